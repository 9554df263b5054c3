#pragma once

#include <vector>

#include "mfl/core.hpp"
#include "mfl/potential.hpp"

namespace mfl {

// Conventions: wavefunctions are samples psi_j = psi(x_j) with sum |psi_j|^2 dx = 1, and
// |psi><psi| is the matrix psi psi^dagger dx. States move forward as psi(t) = e^{-itH/hbar} psi.

// Strang split-step for i hbar psi' = (-hbar^2/2 Laplacian + V(t, x)) psi from t0 to t1
// (t1 < t0 runs the exact inverse steps). The potential is sampled at step midpoints.
CVector propagate_single(const Grid& g, const CVector& psi, const PotentialTimeline& V, double t0, double t1,
                         double dt, double hbar);

// Matrix of the same map, column by column.
CMatrix propagator_matrix(const Grid& g, const PotentialTimeline& V, double t0, double t1, double dt, double hbar);

// Number of steps of size dt in [t0, t1]; throws unless dt divides the interval.
long step_count(double t0, double t1, double dt);

struct HartreeEnsemble {
    std::vector<double> weights;
    std::vector<CVector> states;

    static HartreeEnsemble pure(const CVector& psi) { return {{1.0}, {psi}}; }
    GridOperator density(const Grid& g) const;
    std::vector<double> position_density() const;  // sum lambda |psi|^2
};

// rho~(w_m) = sum_j rho_j e^{-i w_m x_j} dx, for |m| <= mmax
std::vector<cplx> density_fourier(const Grid& g, const std::vector<double>& rho, int mmax);
// V_R = V * rho, exact in Fourier coefficients
PotentialSeries meanfield_potential(const PotentialSeries& V, const std::vector<double>& rho);
PotentialSeries meanfield_potential(const PotentialSeries& V, const GridOperator& R);

double hartree_energy(const Grid& g, const HartreeEnsemble& e, const PotentialSeries& V, double hbar);

struct HartreeTrajectory {
    Grid grid;
    double hbar = 0.0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<HartreeEnsemble> states;
    PotentialTimeline meanfield;

    GridOperator density(std::size_t node) const { return states.at(node).density(grid); }
    std::size_t node_of(double t) const;
};

HartreeTrajectory hartree_evolve(const Grid& g, const HartreeEnsemble& in, const PotentialSeries& V, double T,
                                 double dt, double hbar);

// Psi on the N-fold tensor grid, sum |Psi|^2 dx^N = 1; particle 1 is the slowest index.
struct NBodyState {
    Grid grid;
    int N = 0;
    double hbar = 1.0;
    std::vector<cplx> amps;

    static NBodyState product(const Grid& g, int N, double hbar, const CVector& psi);
    double norm() const;  // sqrt(sum |Psi|^2 dx^N)
    // max |Psi - P_kl Psi| over the swap of particles k, l (0-based)
    double swap_residual(int k, int l) const;
    double symmetry_residual() const;
    // Psi * dx^{N/2}: the unit vector with F_N = phi phi^dagger
    CVector unit_vector() const;
};

inline constexpr std::size_t kMaxAmplitudes = std::size_t(1) << 26;
inline constexpr int kMaxDenseDim = 1 << 13;

NBodyState nbody_evolve(const NBodyState& psi, const PotentialSeries& V, double T, double dt);

// H_N = sum_k T_k + (1/N) sum_{k<l} V(x_k - x_l), dense
CMatrix nbody_hamiltonian(const Grid& g, int N, const PotentialSeries& V, double hbar);

// U_N(t) = e^{+itH_N/hbar} from one Hermitian eigendecomposition
class NBodyPropagator {
public:
    NBodyPropagator(const Grid& g, int N, const PotentialSeries& V, double hbar);
    CMatrix at(double t) const;
    const CMatrix& hamiltonian() const { return H_; }
    int dim() const { return int(H_.rows()); }

private:
    double hbar_;
    CMatrix H_;
    CMatrix vecs_;
    Eigen::VectorXd vals_;
};

CMatrix nbody_propagator(const Grid& g, int N, const PotentialSeries& V, double t, double hbar);

GridOperator marginal1(const NBodyState& psi);
CMatrix marginal2(const NBodyState& psi);
// partial traces of a dense operator on (C^M)^{⊗N}, keeping the first `keep` slots
CMatrix partial_trace(const CMatrix& F, int M, int N, int keep);
CMatrix marginal1(const CMatrix& F, int M, int N);
CMatrix marginal2(const CMatrix& F, int M, int N);

}  // namespace mfl
