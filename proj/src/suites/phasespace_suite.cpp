#include "mfl/suites.hpp"
#include "probes.hpp"

namespace mfl {

using namespace probes;

SuiteResult phasespace_suite(std::uint64_t seed) {
    Stopwatch clock;
    SuiteResult res;
    res.suite = "phasespace";
    std::mt19937_64 rng(seed);
    Grid g = make_grid(1, 64, 2 * kPi);
    const int M = g.M;
    // symbol frequencies up to M/8 keep products and shifts inside |k| < M/4
    CMatrix P = band_projector(g, M / 4 - 1);

    double morph = 0.0;
    for (double h : {1.0, 0.5, 0.2, 0.05})
        for (int trial = 0; trial < 4; ++trial) {
            FourierSymbol a = random_symbol(g, 3, M / 8, 2.0, rng), b = random_symbol(g, 3, M / 8, 2.0, rng);
            PlanckScale hs(h);
            CMatrix lhs = quantize(g, hs, a).mat * quantize(g, hs, b).mat;
            CMatrix rhs = quantize(g, hs, moyal(a, b, h)).mat;
            morph = std::max(morph, op_norm(P * (lhs - rhs) * P) / (a.l1() * b.l1()));
        }
    res.add_max(1, "moyal_morphism", morph, 1e-10);

    double adj = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        FourierSymbol a = random_symbol(g, 4, M / 4, 3.0, rng);
        PlanckScale hs(0.3);
        adj = std::max(adj, max_abs(quantize(g, hs, a).mat.adjoint() - quantize(g, hs, a.conj()).mat) / a.l1());
    }
    res.add_max(1, "quantize_adjoint", adj, 1e-10);

    double shift = 0.0;
    for (double h : {1.0, 0.5, 0.25, 0.125})
        for (int mw : {-16, -3, 1, 7, 16}) {
            double w = g.omega(mw);
            FourierSymbol b = random_symbol(g, 2, 2, 1.5, rng);
            CMatrix E = mod_op(g, w).mat;
            CMatrix lhs = E * quantize(g, PlanckScale(h), b).mat * E.adjoint();
            CMatrix rhs = quantize(g, PlanckScale(h), b.shifted_xi(-h * w)).mat;
            shift = std::max(shift, op_norm(P * (lhs - rhs) * P) / b.l1());
        }
    res.add_max(1, "modulation_shift_identity", shift, 1e-10);

    // pairing against direct sums: x-modes act by multiplication, xi-modes by e^{i beta hbar k}
    double pair = 0.0;
    for (double h : {1.0, 0.3, 0.05}) {
        CVector psi = random_state(g, rng);
        GridOperator R{g, psi * psi.adjoint() * g.dx(), Role::density};
        for (int m : {-5, 1, 9}) {
            cplx want = 0.0;
            for (int j = 0; j < M; ++j) want += std::exp(kI * g.omega(m) * g.node(j)) * std::norm(psi(j)) * g.dx();
            pair = std::max(pair, std::abs(wigner_pair(R, FourierSymbol::mode(g, g.omega(m), 0.0, 1.0), h) - want));
        }
        for (double beta : {0.4, -1.7, 3.0}) {
            cplx want = 0.0;
            for (int k = 0; k < M; ++k) {
                cplx hat = 0.0;
                for (int j = 0; j < M; ++j) hat += std::exp(-2.0 * kPi * kI * double(k) * double(j) / double(M)) * psi(j);
                hat /= std::sqrt(double(M));
                want += std::norm(hat) * g.dx() * std::exp(kI * beta * h * g.freq(k));
            }
            pair = std::max(pair, std::abs(wigner_pair(R, FourierSymbol::mode(g, 0.0, beta, 1.0), h) - want));
        }
    }
    res.add_max(1, "pairing_direct_sums", pair, 1e-10);

    double field = 0.0, planch = 0.0;
    for (double h : {1.0, 0.3}) {
        CVector psi = random_band_state(g, 15, rng), phi = random_band_state(g, 15, rng);
        GridOperator R{g, psi * psi.adjoint() * g.dx(), Role::density};
        GridOperator R2{g, phi * phi.adjoint() * g.dx(), Role::density};
        WignerField w = wigner_field(R, h, 2), w2 = wigner_field(R2, h, 2);
        for (int trial = 0; trial < 5; ++trial) {
            FourierSymbol a = random_symbol(g, 4, 16, 3.0, rng);
            field = std::max(field, std::abs(w.integrate(a) - wigner_pair(R, a, h)) / a.l1());
        }
        planch = std::max(planch, std::abs(2.0 * kPi * h * field_inner(w, w2) - (R.mat.adjoint() * R2.mat).trace()));
        planch = std::max(planch, std::abs(2.0 * kPi * h * field_inner(w, w) - 1.0));
    }
    res.add_max(1, "pairing_sampled_wigner_field", field, 1e-6);
    res.add_max(1, "plancherel_sampled_wigner_field", planch, 1e-6);

    res.files["phasespace.csv"] = checks_csv(res);
    double secs = clock.seconds();
    res.checks.push_back({1, "runtime_seconds", secs, 30.0, secs < 30.0, {}, true});
    return res;
}

}  // namespace mfl
