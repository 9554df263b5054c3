#pragma once

#include <complex>

namespace mfl {

// Unnormalized 1D complex DFT of fixed length. Plans are made once (under a lock, since
// FFTW's planner is not reentrant); execute() is safe to call from several threads.
class Fft1d {
public:
    explicit Fft1d(int n);
    ~Fft1d();
    Fft1d(const Fft1d&) = delete;
    Fft1d& operator=(const Fft1d&) = delete;

    int size() const { return n_; }
    // in place
    void forward(std::complex<double>* data) const;
    void backward(std::complex<double>* data) const;

private:
    int n_;
    void* fwd_;
    void* bwd_;
};

}  // namespace mfl
