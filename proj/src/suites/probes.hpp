#pragma once

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "mfl/core.hpp"
#include "mfl/phasespace.hpp"

namespace mfl::probes {

inline cplx rand_c(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(rng), n(rng)};
}

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rand_c(rng);
    return A;
}

inline CMatrix random_unit_norm(int n, std::mt19937_64& rng) {
    CMatrix A = random_matrix(n, rng);
    return A / op_norm(A);
}

inline CMatrix random_density(int n, std::mt19937_64& rng) {
    CMatrix G = random_matrix(n, rng);
    CMatrix R = G.adjoint() * G;
    return R / R.trace().real();
}

inline CMatrix matrix_unit(int n, int i, int j) {
    CMatrix E = CMatrix::Zero(n, n);
    E(i, j) = 1.0;
    return E;
}

inline CVector random_state(const Grid& g, std::mt19937_64& rng) {
    CVector psi(g.M);
    for (int j = 0; j < g.M; ++j) psi(j) = rand_c(rng);
    return psi / std::sqrt(psi.squaredNorm() * g.dx());
}

// Fourier support |k| <= K
inline CVector random_band_state(const Grid& g, int K, std::mt19937_64& rng) {
    CMatrix F = dft_matrix(g.M);
    CVector c = CVector::Zero(g.M);
    for (int j = 0; j < g.M; ++j)
        if (std::abs(g.wavenumber(j)) <= K) c(j) = rand_c(rng);
    CVector psi = F.adjoint() * c;
    return psi / std::sqrt(psi.squaredNorm() * g.dx());
}

inline FourierSymbol random_symbol(const Grid& g, int nterms, int mmax, double bmax, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> mi(-mmax, mmax);
    std::uniform_real_distribution<double> bu(-bmax, bmax);
    FourierSymbol a(g);
    for (int i = 0; i < nterms; ++i) a.add(g.omega(mi(rng)), bu(rng), rand_c(rng));
    return a;
}

inline FourierSymbol cos_mode(const Grid& g, int m, double beta, double amp) {
    FourierSymbol b = FourierSymbol::mode(g, g.omega(m), beta, 0.5 * amp);
    b.add(g.omega(-m), -beta, 0.5 * amp);
    return b;
}

inline double max_abs(const CMatrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

}  // namespace mfl::probes

namespace mfl::probes {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace mfl::probes
