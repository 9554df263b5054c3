#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mfl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Periodic lattice [0, L)^d with M nodes per axis.
struct Grid {
    int d = 1;
    int M = 0;
    double L = 0.0;

    double dx() const { return L / M; }
    double node(int j) const { return j * dx(); }
    // FFT-order index -> signed wavenumber in [-M/2, M/2)
    int wavenumber(int j) const { return j < M / 2 ? j : j - M; }
    int index_of(int k) const { return ((k % M) + M) % M; }
    double freq(int j) const { return 2.0 * kPi * wavenumber(j) / L; }
    double omega(int m) const { return 2.0 * kPi * m / L; }
    int dim() const;  // M^d

    bool operator==(const Grid& o) const { return d == o.d && M == o.M && L == o.L; }
};

Grid make_grid(int d, int M, double L);
// Small 1d lattice (any even M >= 2) for operator-algebra probes; dynamics use make_grid.
Grid probe_grid(int M, double L);

struct PlanckScale {
    double hbar;
    explicit PlanckScale(double h);
    operator double() const { return hbar; }
};

// Integer lattice index m with alpha = 2*pi*m/L; throws if alpha is off-lattice.
int lattice_index(const Grid& g, double alpha);

enum class Role { generic, density, unitary };

struct GridOperator {
    Grid grid;
    CMatrix mat;
    Role role = Role::generic;
};

void check_role(const GridOperator& op, double tol_scale = 1.0);

// Unitary DFT, (F psi)_k = M^{-1/2} sum_j e^{-2 pi i k j / M} psi_j, k in FFT order.
CMatrix dft_matrix(int M);

// Orthogonal projector (position basis) onto wavenumbers |k| <= K.
CMatrix band_projector(const Grid& g, int K);

double op_norm(const CMatrix& A);
double trace_norm(const CMatrix& A);
// ||P A P|| with P the band projector of half-width K
double band_norm(const Grid& g, const CMatrix& A, int K);

CMatrix kinetic_matrix(const Grid& g, double hbar);  // -hbar^2/2 Laplacian, spectral

CMatrix kron(const CMatrix& A, const CMatrix& B);

}  // namespace mfl
