#include "mfl/core.hpp"

#include <cmath>

namespace mfl {

int Grid::dim() const {
    int n = 1;
    for (int i = 0; i < d; ++i) n *= M;
    return n;
}

Grid make_grid(int d, int M, double L) {
    if (d < 1) throw Error("make_grid: d must be >= 1");
    if (M < 8 || (M & (M - 1)) != 0)
        throw Error("make_grid: M must be a power of two >= 8, got " + std::to_string(M));
    if (!(L > 0.0)) throw Error("make_grid: L must be positive");
    return Grid{d, M, L};
}

Grid probe_grid(int M, double L) {
    if (M < 2 || M % 2 != 0) throw Error("probe_grid: M must be even and >= 2");
    if (!(L > 0.0)) throw Error("probe_grid: L must be positive");
    return Grid{1, M, L};
}

PlanckScale::PlanckScale(double h) : hbar(h) {
    if (!(h > 0.0 && h <= 1.0)) throw Error("hbar must lie in (0, 1], got " + std::to_string(h));
}

int lattice_index(const Grid& g, double alpha) {
    double m = alpha * g.L / (2.0 * kPi);
    double r = std::round(m);
    if (std::abs(m - r) > 1e-9 * std::max(1.0, std::abs(m)))
        throw Error("frequency " + std::to_string(alpha) + " is not a multiple of 2pi/L");
    return static_cast<int>(r);
}

void check_role(const GridOperator& op, double tol_scale) {
    const CMatrix& A = op.mat;
    if (op.role == Role::density) {
        if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * tol_scale)
            throw Error("density operator is not Hermitian");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * tol_scale)
            throw Error("density operator has a negative eigenvalue");
        if (std::abs(A.trace() - cplx(1.0)) > 1e-10 * tol_scale)
            throw Error("density operator does not have unit trace");
    } else if (op.role == Role::unitary) {
        CMatrix I = CMatrix::Identity(A.rows(), A.cols());
        if ((A * A.adjoint() - I).cwiseAbs().maxCoeff() > 1e-10 * tol_scale)
            throw Error("operator is not unitary");
    }
}

CMatrix dft_matrix(int M) {
    CMatrix F(M, M);
    double s = 1.0 / std::sqrt(double(M));
    for (int k = 0; k < M; ++k)
        for (int j = 0; j < M; ++j) {
            // reduce k*j mod M first so the phase stays exact for large M
            int kj = (k * j) % M;
            F(k, j) = std::polar(s, -2.0 * kPi * kj / M);
        }
    return F;
}

CMatrix band_projector(const Grid& g, int K) {
    CMatrix F = dft_matrix(g.M);
    CMatrix D = CMatrix::Zero(g.M, g.M);
    for (int j = 0; j < g.M; ++j)
        if (std::abs(g.wavenumber(j)) <= K) D(j, j) = 1.0;
    return F.adjoint() * D * F;
}

double op_norm(const CMatrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::BDCSVD<CMatrix> svd(A);
    return svd.singularValues()(0);
}

double trace_norm(const CMatrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::BDCSVD<CMatrix> svd(A);
    return svd.singularValues().sum();
}

double band_norm(const Grid& g, const CMatrix& A, int K) {
    CMatrix P = band_projector(g, K);
    return op_norm(P * A * P);
}

CMatrix kinetic_matrix(const Grid& g, double hbar) {
    CMatrix F = dft_matrix(g.M);
    CMatrix D = CMatrix::Zero(g.M, g.M);
    for (int j = 0; j < g.M; ++j) D(j, j) = 0.5 * hbar * hbar * g.freq(j) * g.freq(j);
    return F.adjoint() * D * F;
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
    CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

}  // namespace mfl
