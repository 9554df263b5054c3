#include "mfl/fft.hpp"

#include <mutex>
#include <vector>

#include <fftw3.h>

namespace mfl {

namespace {
std::mutex& planner_lock() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft1d::Fft1d(int n) : n_(n) {
    std::lock_guard<std::mutex> lk(planner_lock());
    std::vector<fftw_complex> a(n);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(n, a.data(), a.data(), FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n, a.data(), a.data(), FFTW_BACKWARD, flags);
}

Fft1d::~Fft1d() {
    std::lock_guard<std::mutex> lk(planner_lock());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft1d::forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft1d::backward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

}  // namespace mfl
