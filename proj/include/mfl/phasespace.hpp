#pragma once

#include <functional>
#include <vector>

#include "mfl/core.hpp"

namespace mfl {

struct SymbolTerm {
    std::vector<double> alpha;  // x-frequency
    std::vector<double> beta;   // xi-frequency
    cplx c;
};

// Finite sum of plane waves c * exp(i(alpha.x + beta.xi)) on phase space.
class FourierSymbol {
public:
    FourierSymbol() = default;
    explicit FourierSymbol(const Grid& g) : grid_(g) {}

    static FourierSymbol constant(const Grid& g, cplx c);
    // d = 1 shorthand
    static FourierSymbol mode(const Grid& g, double alpha, double beta, cplx c);

    // adds a term, merging with an existing (alpha, beta) key; checks the x-lattice
    FourierSymbol& add(const std::vector<double>& alpha, const std::vector<double>& beta, cplx c);
    FourierSymbol& add(double alpha, double beta, cplx c) {
        return add(std::vector<double>{alpha}, std::vector<double>{beta}, c);
    }
    FourierSymbol& add(const FourierSymbol& o, cplx scale = 1.0);

    const Grid& grid() const { return grid_; }
    const std::vector<SymbolTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    cplx eval(const std::vector<double>& x, const std::vector<double>& xi) const;
    cplx eval(double x, double xi) const { return eval(std::vector<double>{x}, std::vector<double>{xi}); }

    FourierSymbol conj() const;
    // every (alpha, beta, c) has a partner (-alpha, -beta, conj c)
    bool is_real(double tol = 1e-12) const;
    // b(x, xi + shift) for d = 1
    FourierSymbol shifted_xi(double shift) const;
    double l1() const;  // sum |c|

private:
    Grid grid_;
    std::vector<SymbolTerm> terms_;
};

FourierSymbol operator+(const FourierSymbol& a, const FourierSymbol& b);
FourierSymbol operator-(const FourierSymbol& a, const FourierSymbol& b);
FourierSymbol operator*(cplx s, const FourierSymbol& a);

cplx symbol_eval(const FourierSymbol& a, const std::vector<double>& x, const std::vector<double>& xi);

GridOperator quantize(const Grid& g, PlanckScale hbar, const FourierSymbol& a);

// A symbol given through its x-Fourier components, a(x, xi) = sum_m e^{i w_m x} prof(m, xi).
// Weyl-quantized entry (k' = k + m mod M, k):  (prof(m, hbar(xi_k + w_m/2)) + prof(m, hbar(xi_k' - w_m/2)))/2
using ModeProfile = std::function<cplx(int m, double eta)>;
GridOperator quantize_profile(const Grid& g, double hbar, const std::vector<int>& modes,
                              const ModeProfile& prof);

// Quantization of an arbitrary callable symbol a(x, xi): x-components are taken by FFT over
// `oversample * M` points, evaluated only on the half-lattice of momenta the quantization needs.
GridOperator quantize_callable(const Grid& g, double hbar,
                               const std::function<cplx(double x, double xi)>& a, int oversample = 2);

GridOperator mod_op(const Grid& g, double omega);

// sign in the single-term Moyal phase exp(i hbar s (a1 b2 - b1 a2)/2); pinned by the product test
inline constexpr int kMoyalSign = -1;

FourierSymbol moyal(const FourierSymbol& a, const FourierSymbol& b, double hbar);

cplx wigner_pair(const GridOperator& K, const FourierSymbol& a, double hbar);

// Sampled Wigner field on P = M*res x-points and the momentum half-lattice
// eta_n = hbar*pi*n/L, n in [-3M/2, 3M/2].
struct WignerField {
    Grid grid;
    double hbar = 0.0;
    std::vector<double> x;
    std::vector<double> eta;
    Eigen::MatrixXcd values;  // values(p, n)
    double cell = 0.0;         // quadrature weight per sample

    // quadrature of the field against a symbol
    cplx integrate(const FourierSymbol& a) const;
    double total() const;
};

WignerField wigner_field(const GridOperator& K, double hbar, int resolution = 2);
cplx field_inner(const WignerField& w1, const WignerField& w2);  // sum conj(w1) w2 * cell

double cv_seminorm(const FourierSymbol& a, int d);
double symbol_ball_norm(const FourierSymbol& a, int n);

// Poisson bracket {xi^2/2, a} for d = 1 is the symbol  i alpha xi a ; not a finite series,
// so it is returned as a mode profile usable with quantize_profile.
struct ProfileSymbol {
    std::vector<int> modes;
    ModeProfile prof;
};
ProfileSymbol kinetic_bracket(const Grid& g, const FourierSymbol& a);

}  // namespace mfl
