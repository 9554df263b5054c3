#pragma once

#include <vector>

#include "mfl/cdyn.hpp"
#include "mfl/core.hpp"
#include "mfl/phasespace.hpp"
#include "mfl/potential.hpp"

namespace mfl {

// b transported along the characteristics: (x, xi) at time t is flowed back to time s.
// With psi(t) = U(t,s) psi(s) this is the symbol that U(t,s) OP[b] U(s,t) approximates.
struct TransportedSymbol {
    FourierSymbol b;
    PotentialTimeline V;
    double t = 0.0;
    double s = 0.0;

    cplx operator()(double x, double xi) const;
};

// Default comparison band |k| <= M/8 - 1; wider bands pick up lattice leakage of the transported symbol at small hbar.
int default_band(const Grid& g);

// U(t,s) OP[b] U(s,t) with split-step columns
GridOperator heisenberg_obs(const FourierSymbol& b, const PotentialTimeline& V, double t, double s, double hbar,
                            double dt);

// OP[b o Phi] through the callable-symbol quadrature
GridOperator transported_quantization(const FourierSymbol& b, const PotentialTimeline& V, double t, double s,
                                      double hbar, int oversample = 2);

// ||P (heisenberg_obs - transported_quantization) P||, band = -1 selects default_band
double egorov_defect(const FourierSymbol& b, const PotentialTimeline& V, double t, double s, double hbar, double dt,
                     int band = -1);

// ||P [E_w, Op] P|| / hbar
double commutator_ratio(double omega, const GridOperator& op, double hbar, int band = -1);

// |w| e^{6 G2 T} + hbar^2 W (e^{6 G2 T} - 1) / (6 G2)   (d = 1)
double commutator_bound_shape(const PotentialTimeline& V, double omega, double hbar, double T);

struct UniformityRow {
    double hbar;
    double omega;
    double t;
    double s;
    double ratio;
    double denominator;
    double normalized;  // ratio / denominator
};

// commutator ratios of B(T, 0) over the (omega, hbar) grid
std::vector<UniformityRow> uniformity_scan(const FourierSymbol& b, const PotentialTimeline& V, double T,
                                           const std::vector<double>& omegas, const std::vector<double>& hbars,
                                           double dt);

// max over hbar of the normalized ratio, per omega (in input order)
std::vector<double> uniformity_max(const std::vector<UniformityRow>& rows, const std::vector<double>& omegas);

// ħ² remainder of the Egorov commutator identity for a single potential mode pair and one symbol mode.
// V must have nonzero coefficients at no more than one pair ±m; a must have one term.
FourierSymbol remainder_symbol(const PotentialSeries& V, const FourierSymbol& a, double hbar);
// coefficient factor 2(y - sin y)/hbar^3 with y = hbar w beta / 2
double remainder_factor(double omega, double beta, double hbar);

// ||P (LHS - hbar^2 OP[R]) P|| for the commutator identity with the classical bracket
double bracket_identity_check(const PotentialSeries& V, const FourierSymbol& a, double hbar, int band = -1);

}  // namespace mfl
