#include "mfl/qemp.hpp"
#include "mfl/suites.hpp"
#include "probes.hpp"

namespace mfl {

using namespace probes;

namespace {

CMatrix comm(const CMatrix& A, const CMatrix& B) { return A * B - B * A; }

GridOperator gop(const Grid& g, const CMatrix& A) { return {g, A, Role::generic}; }

// [J_k A, J_l B] = delta_kl J_k [A, B] and [M A, M B] = M [A, B] / N
double empirical_commutators(const Grid& g, int N, const CMatrix& A, const CMatrix& B) {
    double r = 0.0;
    for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l) {
            CMatrix lhs = comm(jk_embed(A, k, N), jk_embed(B, l, N));
            CMatrix rhs = k == l ? jk_embed(comm(A, B), k, N) : CMatrix::Zero(lhs.rows(), lhs.cols());
            r = std::max(r, max_abs(lhs - rhs));
        }
    ObservableMap Min = empirical_in(g, N);
    return std::max(r, max_abs(comm(Min.apply(A), Min.apply(B)) - Min.apply(comm(A, B)) / double(N)));
}

// C[V, R, L] A = -ad*(V_R) on L, for L in {R, M_in, M_t}
double meanfield_reduction(const Grid& g, int N, const PotentialSeries& V, const GridOperator& R, const CMatrix& U,
                           const CMatrix& A) {
    std::vector<double> vr = meanfield_potential(V, R).on_grid();
    CMatrix VR = CMatrix::Zero(g.M, g.M);
    for (int j = 0; j < g.M; ++j) VR(j, j) = vr[j];
    ObservableMap L = rmap(R, N);
    double r = 0.0;
    for (const ObservableMap& Lam : {L, empirical_in(g, N), empirical_t(g, N, U)})
        r = std::max(r, max_abs(interaction(V, L, Lam, gop(g, A)) + ad_star(gop(g, VR), Lam, gop(g, A))));
    return r;
}

struct ProbeSet {
    Grid g;
    int N;
    std::vector<CMatrix> ops;
};

PotentialSeries probe_potential(const Grid& g) {
    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    if (g.M >= 6) {
        V.set(2, 0.2);
        V.set(-2, 0.2);
    }
    return V;
}

// every algebra identity over one probe set; returns residual per identity
std::vector<std::pair<std::string, double>> algebra_residuals(const ProbeSet& p, std::mt19937_64& rng) {
    const Grid& g = p.g;
    const int N = p.N, M = g.M;
    PotentialSeries V = probe_potential(g);
    CVector psi = random_state(g, rng);
    AlgebraSetup setup{g, N, V, 0.5, psi};
    GridOperator R{g, random_density(M, rng), Role::density};
    CMatrix U = nbody_propagator(g, N, V, 0.3, 0.5);
    int D = 1;
    for (int k = 0; k < N; ++k) D *= M;
    CMatrix F = symmetrize(random_density(D, rng), M, N);
    F /= F.trace();

    double c33 = 0, c34 = 0, c23 = 0, c38 = 0, c32 = 0, cfl = 0;
    for (std::size_t i = 0; i < p.ops.size(); ++i) {
        const CMatrix& A = p.ops[i];
        c23 = std::max(c23, heisenberg_duality_check(setup, 0.4, gop(g, A)).residual);
        c38 = std::max(c38, meanfield_reduction(g, N, V, R, U, A));
        c32 = std::max(c32, hierarchy_interaction_check(setup, 0.3, gop(g, A)).residual);
        cfl = std::max(cfl, initial_fluctuation_identity(N, A, F, R).residual);
        for (std::size_t j = 0; j < p.ops.size(); ++j) {
            const CMatrix& B = p.ops[j];
            c33 = std::max(c33, empirical_commutators(g, N, A, B));
            c34 = std::max(c34, quadratic_marginal_check(N, A, B, F));
        }
    }
    return {{"empirical_commutators", c33}, {"quadratic_marginal_identity", c34},
            {"heisenberg_duality", c23},    {"meanfield_reduction", c38},
            {"hierarchy_interaction", c32}, {"fluctuation_identity", cfl}};
}

}  // namespace

SuiteResult algebra_suite(std::uint64_t seed) {
    Stopwatch clock;
    SuiteResult res;
    res.suite = "algebra";
    std::mt19937_64 rng(seed);

    // complete matrix-unit probes at M = 4
    {
        Grid g = probe_grid(4, 2 * kPi);
        std::vector<CMatrix> units;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) units.push_back(matrix_unit(4, i, j));
        std::map<std::string, double> worst;
        for (int N = 1; N <= 3; ++N)
            for (auto& [name, r] : algebra_residuals({g, N, units}, rng)) worst[name] = std::max(worst[name], r);
        for (auto& [name, r] : worst) res.add_max(2, name + "_units_M4", r, 1e-9, "N = 1..3");
    }
    // random probes at M = 8, N = 2
    {
        Grid g = make_grid(1, 8, 2 * kPi);
        std::vector<CMatrix> ops;
        for (int i = 0; i < 6; ++i) ops.push_back(random_unit_norm(8, rng));
        for (auto& [name, r] : algebra_residuals({g, 2, ops}, rng)) res.add_max(2, name + "_random_M8", r, 1e-8);
    }

    // evolution equations: second order in delta and small at delta = 1e-3 (N = 2, M = 8)
    {
        Grid g = make_grid(1, 8, 2 * kPi);
        PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
        AlgebraSetup s{g, 2, V, 0.5, random_state(g, rng)};
        CMatrix P = band_projector(g, 2);
        CMatrix H = random_matrix(8, rng);
        GridOperator Ab = gop(g, P * (H + H.adjoint()) * P);
        Ab.mat /= op_norm(Ab.mat);
        GridOperator Af = gop(g, H + H.adjoint());
        Af.mat /= op_norm(Af.mat);
        std::vector<double> r, rf;
        for (double d : {4e-3, 2e-3, 1e-3}) {
            r.push_back(empirical_equation_residual(s, Ab, 0.5, d));
            rf.push_back(empirical_equation_residual(s, Af, 0.5, d));
        }
        for (int i = 0; i < 2; ++i)
            res.add_max(3, "empirical_equation_halving_deviation_" + std::to_string(i + 1),
                        std::abs(r[i] / r[i + 1] - 4.0), 1.0,
                        "ratio " + fmt(r[i] / r[i + 1]) + ", band |k| <= 2 probe");
        res.add_max(3, "empirical_equation_residual_1e-3", r[2], 1e-6,
                    "full-band probe: " + fmt(rf[2]) + ", halving ratio " + fmt(rf[1] / rf[2]));

        auto tr = hartree_evolve(g, HartreeEnsemble::pure(random_band_state(g, 3, rng)), V, 1.0, 1.25e-4, 0.5);
        std::vector<double> h;
        for (double d : {4e-3, 2e-3, 1e-3}) h.push_back(hartree_as_special_case(tr, V, Af, 0.5, d, 2));
        for (int i = 0; i < 2; ++i)
            res.add_max(3, "hartree_special_case_halving_deviation_" + std::to_string(i + 1),
                        std::abs(h[i] / h[i + 1] - 4.0), 1.0, "ratio " + fmt(h[i] / h[i + 1]));
        res.add_max(3, "hartree_special_case_residual_1e-3", h[2], 1e-6);
    }

    // factorized initial data: sup over a contraction family of ||((M_in - R) B) sqrt(F)||_HS
    {
        Grid g = make_grid(1, 8, 2 * kPi);
        CVector psi = random_band_state(g, 3, rng);
        GridOperator R{g, psi * psi.adjoint() * g.dx(), Role::density};
        CVector u = psi * std::sqrt(g.dx());
        CVector v = random_state(g, rng) * std::sqrt(g.dx());
        v -= u * u.dot(v);
        v.normalize();
        std::vector<CMatrix> family{u * v.adjoint() + v * u.adjoint()};  // variance 1, the extremal case
        for (int i = 0; i < 12; ++i) {
            Eigen::HouseholderQR<CMatrix> qr(random_matrix(8, rng));
            family.push_back(qr.householderQ() * CMatrix::Identity(8, 8));
            family.push_back(random_unit_norm(8, rng));
        }
        double excess = -INFINITY, ident = 0.0, attain = INFINITY;
        for (int N = 2; N <= 6; ++N) {
            NBodyState st = NBodyState::product(g, N, 1.0, psi);
            double sup = 0.0;
            for (const CMatrix& B : family) {
                Fluctuation f = initial_fluctuation_identity(st, B, R);
                ident = std::max(ident, f.residual);
                sup = std::max(sup, std::sqrt(std::max(0.0, f.lhs)));
            }
            excess = std::max(excess, sup - 1.0 / std::sqrt(double(N)));
            attain = std::min(attain, sup * std::sqrt(double(N)));
        }
        res.add_max(9, "factorized_fluctuation_minus_inverse_sqrt_N", excess, 1e-10,
                    "min over N of sup*sqrt(N): " + fmt(attain));
        res.add_max(9, "factorized_fluctuation_identity", ident, 1e-10);
    }

    Json rep = Json::array();
    for (const auto& c : res.checks)
        rep.push_back({{"check_name", c.name}, {"max_residual", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    res.files["algebra.json"] = rep.dump(2) + "\n";
    res.files["algebra.csv"] = checks_csv(res);
    double secs = clock.seconds();
    res.checks.push_back({2, "runtime_seconds", secs, 120.0, secs < 120.0, {}, true});
    return res;
}

}  // namespace mfl
