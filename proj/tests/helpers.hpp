#pragma once

#include <random>

#include "mfl/core.hpp"
#include "mfl/phasespace.hpp"

namespace testing_util {

using namespace mfl;

inline cplx rand_c(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(rng), n(rng)};
}

// random symbol with integer x-lattice index |m| <= mmax and |beta| <= bmax
inline FourierSymbol random_symbol(const Grid& g, int nterms, int mmax, double bmax, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> mi(-mmax, mmax);
    std::uniform_real_distribution<double> bu(-bmax, bmax);
    FourierSymbol a(g);
    for (int i = 0; i < nterms; ++i) a.add(g.omega(mi(rng)), bu(rng), rand_c(rng));
    return a;
}

// normalized wavefunction (sum |psi|^2 dx = 1) with Fourier support |k| <= K
inline CVector random_band_state(const Grid& g, int K, std::mt19937_64& rng) {
    CMatrix F = dft_matrix(g.M);
    CVector c = CVector::Zero(g.M);
    for (int j = 0; j < g.M; ++j)
        if (std::abs(g.wavenumber(j)) <= K) c(j) = rand_c(rng);
    CVector psi = F.adjoint() * c;
    return psi / std::sqrt(psi.squaredNorm() * g.dx());
}

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rand_c(rng);
    return A;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
    CMatrix A = random_matrix(n, rng);
    return 0.5 * (A + A.adjoint());
}

inline CMatrix random_density(int n, std::mt19937_64& rng) {
    CMatrix G = random_matrix(n, rng);
    CMatrix R = G.adjoint() * G;
    return R / R.trace().real();
}

inline GridOperator pure_density(const Grid& g, const CVector& psi) {
    return {g, psi * psi.adjoint() * g.dx(), Role::density};
}

inline double max_abs(const CMatrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing_util
