#include "mfl/kernels.hpp"

#include <cmath>
#include <limits>

namespace mfl::kernels {

std::size_t tensor_size(int M, int N) {
    std::size_t s = 1;
    // saturates instead of wrapping, so size guards downstream stay meaningful
    for (int i = 0; i < N; ++i) {
        if (s > std::numeric_limits<std::size_t>::max() / std::size_t(M)) return std::numeric_limits<std::size_t>::max();
        s *= std::size_t(M);
    }
    return s;
}

namespace {

inline double pair_sum(std::size_t idx, int M, int N, const std::vector<double>& vdiff, int* digits) {
    for (int a = N - 1; a >= 0; --a) {
        digits[a] = int(idx % M);
        idx /= M;
    }
    double s = 0.0;
    for (int k = 0; k < N; ++k)
        for (int l = k + 1; l < N; ++l) {
            int d = digits[k] - digits[l];
            s += vdiff[d < 0 ? d + M : d];
        }
    return s;
}

inline void one_line(cplx* base, std::size_t stride, int M, const std::vector<cplx>& mult, const Fft1d& fft,
                     cplx* buf) {
    for (int i = 0; i < M; ++i) buf[i] = base[i * stride];
    fft.forward(buf);
    for (int i = 0; i < M; ++i) buf[i] *= mult[i];
    fft.backward(buf);
    for (int i = 0; i < M; ++i) base[i * stride] = buf[i];
}

inline cplx row_dot(const cplx* a, const cplx* b, std::size_t n) {
    cplx s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += a[r] * std::conj(b[r]);
    return s;
}

}  // namespace

namespace serial {

void pair_phase(std::vector<cplx>& amps, int M, int N, const std::vector<double>& vdiff, double factor) {
    std::vector<int> digits(N);
    for (std::size_t i = 0; i < amps.size(); ++i)
        amps[i] *= std::polar(1.0, factor * pair_sum(i, M, N, vdiff, digits.data()));
}

void axis_multiplier(std::vector<cplx>& amps, int M, int N, const std::vector<cplx>& mult, const Fft1d& fft) {
    const std::size_t total = amps.size(), lines = total / M;
    std::vector<cplx> buf(M);
    std::size_t stride = total / M;
    for (int axis = 0; axis < N; ++axis, stride /= M) {
        for (std::size_t l = 0; l < lines; ++l) {
            std::size_t outer = l / stride, inner = l % stride;
            one_line(amps.data() + outer * stride * M + inner, stride, M, mult, fft, buf.data());
        }
    }
}

CMatrix contract(const std::vector<cplx>& amps, int M, int N, int lead, double scale) {
    const std::size_t rows = tensor_size(M, lead), rest = tensor_size(M, N - lead);
    CMatrix F(rows, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = i; j < rows; ++j) {
            F(i, j) = scale * row_dot(amps.data() + i * rest, amps.data() + j * rest, rest);
            F(j, i) = std::conj(F(i, j));
        }
    return F;
}

}  // namespace serial

namespace parallel {

void pair_phase(std::vector<cplx>& amps, int M, int N, const std::vector<double>& vdiff, double factor) {
    const long long n = (long long)amps.size();
#pragma omp parallel
    {
        std::vector<int> digits(N);
#pragma omp for schedule(static)
        for (long long i = 0; i < n; ++i)
            amps[i] *= std::polar(1.0, factor * pair_sum(std::size_t(i), M, N, vdiff, digits.data()));
    }
}

void axis_multiplier(std::vector<cplx>& amps, int M, int N, const std::vector<cplx>& mult, const Fft1d& fft) {
    const std::size_t total = amps.size();
    const long long lines = (long long)(total / M);
    std::size_t stride = total / M;
    for (int axis = 0; axis < N; ++axis, stride /= M) {
#pragma omp parallel
        {
            std::vector<cplx> buf(M);
#pragma omp for schedule(static)
            for (long long l = 0; l < lines; ++l) {
                std::size_t outer = std::size_t(l) / stride, inner = std::size_t(l) % stride;
                one_line(amps.data() + outer * stride * M + inner, stride, M, mult, fft, buf.data());
            }
        }
    }
}

CMatrix contract(const std::vector<cplx>& amps, int M, int N, int lead, double scale) {
    const std::size_t rows = tensor_size(M, lead), rest = tensor_size(M, N - lead);
    CMatrix F(rows, rows);
    const long long cells = (long long)(rows * rows);
#pragma omp parallel for schedule(dynamic, 4)
    for (long long c = 0; c < cells; ++c) {
        std::size_t i = std::size_t(c) / rows, j = std::size_t(c) % rows;
        if (j < i) continue;
        F(i, j) = scale * row_dot(amps.data() + i * rest, amps.data() + j * rest, rest);
        F(j, i) = std::conj(F(i, j));
    }
    return F;
}

}  // namespace parallel

}  // namespace mfl::kernels
