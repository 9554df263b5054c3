#include "doctest.h"
#include "helpers.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "mfl/metrics.hpp"

using namespace mfl;
using namespace testing_util;

namespace {

std::string tmp_path(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / "mfl_test_metrics";
    std::filesystem::create_directories(d);
    return (d / name).string();
}

ConvergeConfig small_config() {
    ConvergeConfig c;
    c.grid = make_grid(1, 16, 2 * kPi);
    c.V = PotentialSeries::cosine(c.grid, 1, 0.5);
    c.T = 0.25;
    c.dt = 0.0025;
    c.Ns = {2, 3, 4};
    c.hbars = {1.0, 0.5};
    return c;
}

}  // namespace

TEST_CASE("loglog slope against exact power laws") {
    std::vector<std::pair<double, double>> p;
    for (double x : {1.0, 2.0, 3.0, 5.0, 8.0}) p.push_back({x, 3.0 * std::pow(x, -2.0)});
    auto f = loglog_slope(p);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    p[2].second *= 1.5;
    CHECK(loglog_slope(p).r2 < 1.0);
    CHECK_THROWS_AS(loglog_slope({{1, 1}, {2, 2}}), Error);
    CHECK_THROWS_AS(loglog_slope({{1, 1}, {2, 0}, {3, 1}}), Error);
    CHECK_THROWS_AS(loglog_slope({{2, 1}, {2, 2}, {2, 3}}), Error);
}

TEST_CASE("loglog slope on constant and noisy data") {
    std::vector<std::pair<double, double>> c, n;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z(0.0, 0.01);
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        c.push_back({x, 0.7});
        n.push_back({x, 3.0 / std::sqrt(x) * (1.0 + z(rng))});
    }
    CHECK(std::abs(loglog_slope(c).slope) < 1e-12);
    CHECK(loglog_slope(n).slope == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("dual norm estimate is a seminorm, monotone in the cutoff, below the trace-norm bound") {
    Grid g = make_grid(1, 16, 2 * kPi);
    std::mt19937_64 rng(5);
    DualNormFamily f;
    for (int r = 0; r < 20; ++r) {
        GridOperator A{g, random_matrix(16, rng), Role::generic}, B{g, random_matrix(16, rng), Role::generic};
        double h = 0.1 + 0.045 * r;
        double a = dual_norm_estimate(A, h, f).value, b = dual_norm_estimate(B, h, f).value;
        GridOperator S{g, A.mat + B.mat, Role::generic}, T{g, cplx(-1.5, 2.0) * A.mat, Role::generic};
        CHECK(dual_norm_estimate(S, h, f).value <= a + b + 1e-12 * (a + b));
        CHECK(std::abs(dual_norm_estimate(T, h, f).value - 2.5 * a) < 1e-12 * a);

        auto prof = dual_norm_profile(A, h, f);
        REQUIRE(prof.size() == 5);
        for (std::size_t c = 1; c < prof.size(); ++c) CHECK(prof[c] >= prof[c - 1]);
        CHECK(prof.back() == doctest::Approx(a).epsilon(1e-14));

        double qmax = 0.0;
        for (const auto& m : family_modes(g, f))
            qmax = std::max(qmax, op_norm(quantize(g, PlanckScale(h), FourierSymbol::mode(g, m.alpha, m.beta, 1.0)).mat) /
                                      m.weight);
        CHECK(a <= trace_norm(A.mat) * qmax * (1 + 1e-12));
    }
}

TEST_CASE("dual norm family and estimate") {
    Grid g = make_grid(1, 16, 2 * kPi);
    DualNormFamily f;
    auto modes = family_modes(g, f);
    CHECK(modes.size() == 81);
    for (const auto& m : modes)
        CHECK(m.weight == doctest::Approx(std::pow(std::max({1.0, std::abs(m.alpha), std::abs(m.beta)}), 6)));
    CHECK_THROWS_AS(family_modes(g, {6, -1, 4}), Error);

    std::mt19937_64 rng(3);
    GridOperator zero{g, CMatrix::Zero(g.M, g.M), Role::generic};
    CHECK(dual_norm_estimate(zero, 0.5, f).value == 0.0);

    // beta = 0 modes quantize to multiplication, so the pairing only sees the diagonal
    CMatrix D = random_hermitian(g.M, rng);
    GridOperator K{g, D, Role::generic};
    DualNormFamily f0{2, 4, 0};
    double oracle = 0.0, arg = 0.0;
    for (int m = -4; m <= 4; ++m) {
        cplx s = 0.0;
        for (int j = 0; j < g.M; ++j) s += D(j, j) * std::exp(kI * g.omega(m) * g.node(j));
        double v = std::abs(s) / std::pow(std::max(1.0, std::abs(g.omega(m))), 2);
        if (v > oracle) oracle = v, arg = g.omega(m);
    }
    auto e = dual_norm_estimate(K, 0.3, f0);
    CHECK(e.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(e.alpha == arg);
    CHECK(e.beta == 0.0);

    // scaling
    GridOperator K2{g, 2.5 * D, Role::generic};
    CHECK(dual_norm_estimate(K2, 0.3, f).value == doctest::Approx(2.5 * dual_norm_estimate(K, 0.3, f).value));
}

TEST_CASE("initial gaussian") {
    Grid g = make_grid(1, 32, 2 * kPi);
    CVector psi = initial_state(g, {});
    CHECK(psi.squaredNorm() * g.dx() == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::Index imax;
    psi.cwiseAbs().maxCoeff(&imax);
    CHECK(imax == 16);
    CHECK(std::abs(psi(15) - psi(17)) < 1e-14);
    // periodic distance: a center near 0 wraps
    CVector w = initial_state(g, {"gaussian", 0.5, 0.0});
    CHECK(std::abs(w(1) - w(31)) < 1e-14);
    CHECK_THROWS_AS(initial_state(g, {"gaussian", 0.0, 1.0}), Error);
    CHECK_THROWS_AS(initial_state(g, {"boxcar", 0.5, 1.0}), Error);
}

TEST_CASE("trace distance") {
    {
        Grid g = make_grid(1, 16, 1.0);
        std::mt19937_64 rng(8);
        CMatrix A = random_density(16, rng), B = random_density(16, rng);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(A - B);
        CHECK(trace_distance({g, A}, {g, B}) == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-12));
    }
    Grid g = make_grid(1, 8, 1.0);
    CMatrix A = CMatrix::Zero(8, 8), B = CMatrix::Zero(8, 8);
    A(0, 0) = 1.0;
    B(1, 1) = 1.0;
    CHECK(trace_distance({g, A}, {g, B}) == doctest::Approx(2.0));
    CHECK(trace_distance({g, A}, {g, A}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(trace_distance({g, A}, {make_grid(1, 8, 2.0), B}), Error);
}

TEST_CASE("converge run without interaction is exact") {
    ConvergeConfig c = small_config();
    c.V = PotentialSeries::zero(c.grid);
    auto recs = converge_run(c);
    REQUIRE(recs.size() == 6);
    for (const auto& r : recs) CHECK(r.error < 1e-12);
    auto u = uniformity_report(recs);
    CHECK(u.degenerate);
    CHECK(u.pass);

    c.Ns = {1};
    for (const auto& r : converge_run(c)) CHECK(r.error < 1e-9);
}

TEST_CASE("converge run at T = 0 compares identical data") {
    ConvergeConfig c = small_config();
    c.T = 0.0;
    auto recs = converge_run(c);
    for (const auto& r : recs) CHECK(r.error < 1e-12);
    CHECK(uniformity_report(recs).degenerate);
}

TEST_CASE("converge run: error falls with N, records are reproducible") {
    ConvergeConfig c = small_config();
    auto recs = converge_run(c);
    REQUIRE(recs.size() == 6);
    for (int h = 0; h < 2; ++h) {
        CHECK(recs[3 * h].error > recs[3 * h + 1].error);
        CHECK(recs[3 * h + 1].error > recs[3 * h + 2].error);
        CHECK(recs[3 * h].error > 1e-6);
    }
    for (const auto& r : recs) {
        CHECK(r.M == 16);
        CHECK(r.t == 0.25);
        CHECK(r.wall_ms == 0.0);
    }
    CHECK(records_csv(converge_run(c)) == records_csv(recs));

    c.Ns = {100};
    CHECK_THROWS_AS(converge_run(c), Error);
    c.Ns = {};
    CHECK_THROWS_AS(converge_run(c), Error);
}

TEST_CASE("uniformity report") {
    std::vector<ConvergenceRecord> r;
    r.push_back({2, 1.0, 1, 16, 0.01, 0.10, 0, 0, 0});
    r.push_back({2, 0.5, 1, 16, 0.01, 0.04, 0, 0, 0});
    r.push_back({3, 1.0, 1, 16, 0.01, 0.05, 0, 0, 0});
    r.push_back({3, 0.5, 1, 16, 0.01, 0.001, 0, 0, 0});
    auto u = uniformity_report(r, 5.0);
    REQUIRE(u.rows.size() == 2);
    CHECK(u.rows[0].ratio == doctest::Approx(2.5));
    CHECK(u.rows[1].ratio == doctest::Approx(50.0));
    CHECK_FALSE(u.pass);
    CHECK(uniformity_report(r, 100.0).pass);
    std::vector<ConvergenceRecord> one{r[0], r[2]};
    for (const auto& row : uniformity_report(one).rows) CHECK(row.ratio == 1.0);
    CHECK_THROWS_AS(uniformity_report(r, 5.0, 3), Error);
    CHECK_THROWS_AS(uniformity_report({}), Error);
}

TEST_CASE("sha256 and report emission") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    std::vector<ConvergenceRecord> r;
    r.push_back({2, 1.0, 1, 16, 0.0025, 0.1234567890123456789, 1.0, -2.0, 0});
    r.push_back({5, 0.25, 1, 16, 0.0025, 1.0 / 3.0, 0.0, 4.0, 12.5});
    std::string csv = records_csv(r);
    CHECK(csv.substr(0, csv.find('\n')) == "N,hbar,t,M,dt,error,argmax_alpha,argmax_beta,wall_ms");
    CHECK(parse_records_csv(csv) == r);
    CHECK_THROWS_AS(parse_records_csv("N,hbar\n1,2\n"), Error);
    CHECK(records_csv({}) == std::string(kConvergeCsvHeader) + "\n");

    // every field participates in the hash
    std::string h0 = sha256_hex(csv);
    for (int f = 0; f < 9; ++f) {
        auto q = r;
        auto& x = q[1];
        switch (f) {
            case 0: x.N += 1; break;
            case 1: x.hbar = std::nextafter(x.hbar, 1.0); break;
            case 2: x.t = std::nextafter(x.t, 2.0); break;
            case 3: x.M *= 2; break;
            case 4: x.dt = std::nextafter(x.dt, 1.0); break;
            case 5: x.error = std::nextafter(x.error, 1.0); break;
            case 6: x.argmax_alpha += 1; break;
            case 7: x.argmax_beta -= 1; break;
            case 8: x.wall_ms = std::nextafter(x.wall_ms, 100.0); break;
        }
        CHECK(sha256_hex(records_csv(q)) != h0);
    }
    CHECK(sha256_hex(records_csv(r)) == h0);

    std::string pc = tmp_path("r.csv"), pj = tmp_path("r.json");
    emit_report(r, pc, "csv");
    emit_report(r, pj, "json", R"({"seed": 7})");
    std::ifstream fc(pc);
    std::string back((std::istreambuf_iterator<char>(fc)), {});
    CHECK(back == csv);
    std::ifstream fj(pj);
    auto j = nlohmann::json::parse(fj);
    CHECK(j["config"]["seed"] == 7);
    CHECK(j["hash"] == sha256_hex(csv));
    CHECK(j["records"].size() == 2);
    CHECK(j["records"][1]["error"].get<double>() == 1.0 / 3.0);
    CHECK_THROWS_AS(emit_report(r, pc, "xml"), Error);
    CHECK_THROWS_AS(emit_report(r, "/nonexistent/dir/x.csv", "csv"), Error);
}
