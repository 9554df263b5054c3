#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mfl/phasespace.hpp"
#include "mfl/potential.hpp"

namespace mfl {

struct ParticleEnsemble {
    std::vector<double> x;   // wrapped into [0, L)
    std::vector<double> xi;

    int size() const { return int(x.size()); }
    void wrap(double L);
};

struct ClassicalTrajectory {
    PotentialSeries potential;
    double dt = 0.0;
    std::string scheme = "velocity-verlet";
    std::vector<double> times;
    std::vector<ParticleEnsemble> frames;

    std::size_t node_of(double t) const;
};

// F_k = -(1/N) sum_l V'(x_k - x_l); the l = k term vanishes for even V
std::vector<double> pair_forces(const ParticleEnsemble& z, const PotentialSeries& V);
// sum xi^2/2 + (1/2N) sum_{k != l} V(x_k - x_l)
double newton_energy(const ParticleEnsemble& z, const PotentialSeries& V);

ClassicalTrajectory newton_flow(const ParticleEnsemble& z, const PotentialSeries& V, double T, double dt);

// (1/N) sum_k phi(x_k, xi_k)
cplx empirical_pair(const ParticleEnsemble& z, const FourierSymbol& phi);

// | d/dt <mu_t, phi> (central difference over +-delta) - <mu_t, xi phi_x - (V' * rho_t) phi_xi> |
double vlasov_residual(const ClassicalTrajectory& traj, const FourierSymbol& phi, double t, double delta);

struct PhasePoint {
    double x = 0.0;
    double xi = 0.0;
};

// Phi(t, s): solution at time t of X' = Xi, Xi' = -dV/dx(tau, X) started from p at time s.
// RK4 on steps aligned with the timeline nodes, refined by doubling until successive answers
// differ by < tol. Positions are not wrapped.
PhasePoint characteristics(const PotentialTimeline& V, double t, double s, PhasePoint p, double tol = 1e-10);

// |d^nu Phi(t,s)| at p by central differences; nu = {order in x, order in xi}, |nu| <= 3.
// Returns the larger of the two components.
double flow_derivative_probe(const PotentialTimeline& V, double t, double s, std::array<int, 2> nu, PhasePoint p);

// f1(x, xi) = rho(x) * N(xi; mean, sigma) with rho(x) = (1 + sum_m a_m cos(w_m x)) / L
struct ProductDensity {
    Grid grid;
    std::vector<std::pair<int, double>> cos_modes;
    double xi_mean = 0.0;
    double xi_sigma = 1.0;

    double x_density(double x) const;
    void validate() const;
};

std::vector<ParticleEnsemble> sample_product(const ProductDensity& f1, int N, int count, std::uint64_t seed);

}  // namespace mfl
