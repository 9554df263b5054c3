#include "mfl/egorov.hpp"

#include <cmath>

#include "mfl/qdyn.hpp"

namespace mfl {

namespace {

CMatrix band_compress(const Grid& g, const CMatrix& A, int band) {
    CMatrix P = band_projector(g, band < 0 ? default_band(g) : band);
    return P * A * P;
}

// nonzero modes of V, m != 0
std::vector<int> active_modes(const PotentialSeries& V) {
    std::vector<int> ms;
    for (int m = -V.mmax(); m <= V.mmax(); ++m)
        if (m != 0 && V.hat(m) != cplx(0.0)) ms.push_back(m);
    return ms;
}

void require_single_modes(const PotentialSeries& V, const FourierSymbol& a, const char* who) {
    auto ms = active_modes(V);
    if (ms.size() > 2 || (ms.size() == 2 && ms[0] != -ms[1]))
        throw Error(std::string(who) + ": potential must carry a single mode pair");
    if (a.terms().size() != 1) throw Error(std::string(who) + ": symbol must be a single mode");
    if (a.grid().d != 1) throw Error(std::string(who) + ": one dimension only");
    if (!(a.grid() == V.grid())) throw Error(std::string(who) + ": symbol and potential live on different grids");
}

}  // namespace

cplx TransportedSymbol::operator()(double x, double xi) const {
    PhasePoint q = characteristics(V, s, t, {x, xi});
    return b.eval(q.x, q.xi);
}

int default_band(const Grid& g) { return g.M / 8 - 1; }

GridOperator heisenberg_obs(const FourierSymbol& b, const PotentialTimeline& V, double t, double s, double hbar,
                            double dt) {
    const Grid& g = b.grid();
    V.require_cover(std::min(s, t), std::max(s, t), "heisenberg_obs");
    GridOperator B = quantize(g, PlanckScale(hbar), b);
    if (t == s) return B;
    CMatrix U = propagator_matrix(g, V, s, t, dt, hbar);
    return {g, U * B.mat * U.adjoint(), Role::generic};
}

GridOperator transported_quantization(const FourierSymbol& b, const PotentialTimeline& V, double t, double s,
                                      double hbar, int oversample) {
    V.require_cover(std::min(s, t), std::max(s, t), "transported_quantization");
    if (t == s) return quantize(b.grid(), PlanckScale(hbar), b);
    TransportedSymbol ts{b, V, t, s};
    return quantize_callable(b.grid(), hbar, [&ts](double x, double xi) { return ts(x, xi); }, oversample);
}

double egorov_defect(const FourierSymbol& b, const PotentialTimeline& V, double t, double s, double hbar, double dt,
                     int band) {
    GridOperator q = heisenberg_obs(b, V, t, s, hbar, dt);
    GridOperator c = transported_quantization(b, V, t, s, hbar);
    return op_norm(band_compress(b.grid(), q.mat - c.mat, band));
}

double commutator_ratio(double omega, const GridOperator& op, double hbar, int band) {
    if (!(hbar > 0.0)) throw Error("commutator_ratio: hbar must be positive");
    CMatrix E = mod_op(op.grid, omega).mat;
    return op_norm(band_compress(op.grid, E * op.mat - op.mat * E, band)) / hbar;
}

double commutator_bound_shape(const PotentialTimeline& V, double omega, double hbar, double T) {
    const double k = 6.0 * V.gamma2();
    double growth = std::exp(k * T);
    double integral = k > 1e-12 ? (growth - 1.0) / k : T;
    return std::abs(omega) * growth + hbar * hbar * V.bold_w() * integral;
}

std::vector<UniformityRow> uniformity_scan(const FourierSymbol& b, const PotentialTimeline& V, double T,
                                           const std::vector<double>& omegas, const std::vector<double>& hbars,
                                           double dt) {
    std::vector<UniformityRow> rows;
    for (double h : hbars) {
        GridOperator B = heisenberg_obs(b, V, T, 0.0, h, dt);
        for (double w : omegas) {
            double r = commutator_ratio(w, B, h);
            double den = commutator_bound_shape(V, w, h, T);
            rows.push_back({h, w, T, 0.0, r, den, den > 0.0 ? r / den : 0.0});
        }
    }
    return rows;
}

std::vector<double> uniformity_max(const std::vector<UniformityRow>& rows, const std::vector<double>& omegas) {
    std::vector<double> out;
    for (double w : omegas) {
        double m = 0.0;
        for (const auto& r : rows)
            if (r.omega == w) m = std::max(m, r.normalized);
        out.push_back(m);
    }
    return out;
}

double remainder_factor(double omega, double beta, double hbar) {
    double y = 0.5 * hbar * omega * beta;
    double d;
    if (std::abs(y) < 1e-2) {
        double y2 = y * y;
        d = y * y2 * (1.0 / 6 - y2 * (1.0 / 120 - y2 * (1.0 / 5040 - y2 / 362880)));
    } else {
        d = y - std::sin(y);
    }
    return 2.0 * d / (hbar * hbar * hbar);
}

FourierSymbol remainder_symbol(const PotentialSeries& V, const FourierSymbol& a, double hbar) {
    require_single_modes(V, a, "remainder_symbol");
    const SymbolTerm& t = a.terms().front();
    const Grid& g = a.grid();
    FourierSymbol r(g);
    for (int m : active_modes(V)) {
        double w = g.omega(m);
        double f = remainder_factor(w, t.beta[0], hbar);
        if (f != 0.0) r.add(t.alpha[0] + w, t.beta[0], V.hat(m) * t.c * f);
    }
    return r;
}

double bracket_identity_check(const PotentialSeries& V, const FourierSymbol& a, double hbar, int band) {
    require_single_modes(V, a, "bracket_identity_check");
    const Grid& g = a.grid();
    PlanckScale h(hbar);
    CMatrix H = kinetic_matrix(g, hbar);
    for (int j = 0; j < g.M; ++j) H(j, j) += V.value(g.node(j));
    CMatrix A = quantize(g, h, a).mat;
    CMatrix lhs = (H * A - A * H) / (kI * hbar);
    ProfileSymbol kb = kinetic_bracket(g, a);
    lhs += quantize_profile(g, hbar, kb.modes, kb.prof).mat;
    // {V, a} = dxi V dx a - dx V dxi a = -(i w V_m)(i beta c) e^{i((alpha + w)x + beta xi)}
    const SymbolTerm& t = a.terms().front();
    FourierSymbol pb(g);
    for (int m : active_modes(V)) {
        double w = g.omega(m);
        cplx c = w * t.beta[0] * V.hat(m) * t.c;
        if (c != cplx(0.0)) pb.add(t.alpha[0] + w, t.beta[0], c);
    }
    if (!pb.empty()) lhs += quantize(g, h, pb).mat;
    FourierSymbol R = remainder_symbol(V, a, hbar);
    CMatrix rhs = R.empty() ? CMatrix::Zero(g.M, g.M) : CMatrix(hbar * hbar * quantize(g, h, R).mat);
    return op_norm(band_compress(g, lhs - rhs, band));
}

}  // namespace mfl
