#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <limits>

#include "mfl/kernels.hpp"
#include "mfl/qdyn.hpp"

using namespace mfl;
using namespace testing_util;

namespace {

// exp(-i H t / hbar) psi by eigendecomposition of a dense Hermitian H
CVector expm_apply(const CMatrix& H, const CVector& psi, double t, double hbar) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    CVector ph(H.rows());
    for (Eigen::Index i = 0; i < H.rows(); ++i) ph(i) = std::exp(-kI * es.eigenvalues()(i) * t / hbar);
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * psi;
}

CMatrix single_hamiltonian(const Grid& g, const PotentialSeries& V, double hbar) {
    CMatrix H = kinetic_matrix(g, hbar);
    auto v = V.on_grid();
    for (int j = 0; j < g.M; ++j) H(j, j) += v[j];
    return H;
}

PotentialSeries two_mode(const Grid& g) {
    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    V.set(2, 0.1);
    V.set(-2, 0.1);
    return V;
}

}  // namespace

TEST_CASE("potential series basics") {
    Grid g = make_grid(1, 16, 2 * kPi);
    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    CHECK(V.hat(1) == cplx(0.25));
    CHECK(V.total_variation() == doctest::Approx(0.5));
    CHECK(V.is_even());
    CHECK(std::abs(V.value(0.3) - 0.5 * std::cos(0.3)) < 1e-15);
    CHECK(std::abs(V.grad(0.3) + 0.5 * std::sin(0.3)) < 1e-15);
    CHECK(std::abs(V.hess(0.3) + 0.5 * std::cos(0.3)) < 1e-15);
    CHECK(V.gamma2() == doctest::Approx(0.5));
    CHECK(V.bold_v() == doctest::Approx(0.5 * std::pow(2.0, 7)));
    PotentialSeries odd(g, 1);
    odd.set(1, cplx(0.0, 0.3));
    odd.set(-1, cplx(0.0, -0.3));
    CHECK(odd.is_real());
    CHECK_FALSE(odd.is_even());
    CHECK_THROWS_AS(odd.require_even_real("x"), Error);

    PotentialTimeline tl(0.0, 0.5, {PotentialSeries::cosine(g, 1, 0.0), PotentialSeries::cosine(g, 1, 1.0)});
    CHECK(std::abs(tl.at(0.25).hat(1) - 0.25) < 1e-15);
    CHECK(tl.covers(0.0, 0.5));
    CHECK_FALSE(tl.covers(0.0, 0.6));
}

TEST_CASE("propagate_single") {
    Grid g = make_grid(1, 16, 2 * kPi);
    const double hbar = 0.7;
    SUBCASE("free momentum eigenstate") {
        int k = 3;
        CVector psi(16);
        for (int j = 0; j < 16; ++j) psi(j) = std::exp(kI * double(k) * (j * g.dx())) / std::sqrt(g.L);
        PotentialTimeline zero(PotentialSeries::zero(g));
        CVector out = propagate_single(g, psi, zero, 0.0, 1.3, 0.01, hbar);
        CVector want = std::exp(-kI * hbar * double(k * k) * 1.3 / 2.0) * psi;
        CHECK((out - want).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("unitarity and exact reversibility") {
        std::mt19937_64 rng(1);
        CVector psi = random_band_state(g, 8, rng);
        PotentialTimeline tl(0.0, 0.25, {two_mode(g), PotentialSeries::cosine(g, 1, -0.3), two_mode(g),
                                         PotentialSeries::cosine(g, 2, 0.2), two_mode(g)});
        CVector out = propagate_single(g, psi, tl, 0.0, 1.0, 0.01, hbar);
        CHECK(std::abs(out.squaredNorm() * g.dx() - 1.0) < 1e-12);
        CVector back = propagate_single(g, out, tl, 1.0, 0.0, 0.01, hbar);
        CHECK((back - psi).cwiseAbs().maxCoeff() < 1e-11);
        CHECK_THROWS_AS(propagate_single(g, psi, tl, 0.0, 1.5, 0.01, hbar), Error);
        CHECK_THROWS_AS(propagate_single(g, psi, tl, 0.0, 1.0, 0.0, hbar), Error);
        CHECK_THROWS_AS(propagate_single(g, psi, tl, 0.0, 1.0, 0.3, hbar), Error);
    }
    SUBCASE("second order against the dense exponential") {
        std::mt19937_64 rng(2);
        CVector psi = random_band_state(g, 8, rng);
        PotentialSeries V = two_mode(g);
        CVector exact = expm_apply(single_hamiltonian(g, V, hbar), psi, 1.0, hbar);
        double prev = 0.0;
        for (double dt : {0.02, 0.01, 0.005}) {
            CVector out = propagate_single(g, psi, PotentialTimeline(V), 0.0, 1.0, dt, hbar);
            double err = (out - exact).norm() * std::sqrt(g.dx());
            if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.2));
            prev = err;
        }
        // propagator matrix agrees with column propagation
        CMatrix U = propagator_matrix(g, PotentialTimeline(V), 0.0, 0.5, 0.01, hbar);
        CHECK((U * psi - propagate_single(g, psi, PotentialTimeline(V), 0.0, 0.5, 0.01, hbar)).cwiseAbs().maxCoeff() <
              1e-12);
    }
    SUBCASE("time-dependent potential: refinement against a dt/8 reference") {
        std::mt19937_64 rng(4);
        CVector psi = random_band_state(g, 6, rng);
        PotentialTimeline tl(0.0, 0.5, {two_mode(g), PotentialSeries::cosine(g, 1, -0.4), two_mode(g)});
        CVector ref = propagate_single(g, psi, tl, 0.0, 1.0, 0.01 / 8, hbar);
        double e1 = (propagate_single(g, psi, tl, 0.0, 1.0, 0.02, hbar) - ref).norm();
        double e2 = (propagate_single(g, psi, tl, 0.0, 1.0, 0.01, hbar) - ref).norm();
        // the reference carries its own O(dt^2) error, so the observed ratio is (16 - 1/16)/(4 - 1/16)... ~ 4
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
    }
}

TEST_CASE("hartree_evolve") {
    Grid g = make_grid(1, 16, 2 * kPi);
    std::mt19937_64 rng(7);
    SUBCASE("free evolution keeps momentum amplitudes") {
        CVector psi = random_band_state(g, 6, rng);
        auto tr = hartree_evolve(g, HartreeEnsemble::pure(psi), PotentialSeries::zero(g), 1.0, 0.01, 0.5);
        CMatrix F = dft_matrix(16);
        CVector a0 = F * psi, a1 = F * tr.states.back().states[0];
        CHECK((a0.cwiseAbs() - a1.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(tr.times.size() == 101);
    }
    SUBCASE("uniform state stays uniform") {
        CVector psi = CVector::Constant(16, 1.0 / std::sqrt(g.L));
        auto tr = hartree_evolve(g, HartreeEnsemble::pure(psi), PotentialSeries::cosine(g, 1, 0.5), 1.0, 0.01, 0.5);
        auto rho = tr.states.back().position_density();
        for (double r : rho) CHECK(std::abs(r - 1.0 / g.L) < 1e-10);
        auto v = tr.meanfield.at(0.5).on_grid();
        for (double x : v) CHECK(std::abs(x - v[0]) < 1e-12);
    }
    SUBCASE("mass exact, energy drift second order, rank preserved") {
        CVector psi = random_band_state(g, 5, rng);
        PotentialSeries V = PotentialSeries::cosine(g, 1, 1.0);
        double hbar = 0.5;
        double e0 = hartree_energy(g, HartreeEnsemble::pure(psi), V, hbar);
        std::vector<double> drift;
        for (double dt : {0.02, 0.01}) {
            auto tr = hartree_evolve(g, HartreeEnsemble::pure(psi), V, 1.0, dt, hbar);
            const auto& last = tr.states.back();
            CHECK(std::abs(last.states[0].squaredNorm() * g.dx() - 1.0) < 1e-12);
            GridOperator R = tr.density(tr.states.size() - 1);
            CHECK(std::abs((R.mat * R.mat - R.mat).norm()) < 1e-12);  // still a projector
            drift.push_back(std::abs(hartree_energy(g, last, V, hbar) - e0));
        }
        CHECK(drift[0] / drift[1] == doctest::Approx(4.0).epsilon(0.25));
    }
    SUBCASE("ensemble input and validation") {
        HartreeEnsemble e{{0.25, 0.75}, {random_band_state(g, 4, rng), random_band_state(g, 4, rng)}};
        auto tr = hartree_evolve(g, e, PotentialSeries::cosine(g, 1, 0.5), 0.2, 0.01, 0.5);
        CHECK(std::abs(tr.density(tr.states.size() - 1).mat.trace() - 1.0) < 1e-12);
        HartreeEnsemble bad{{0.5, 0.6}, e.states};
        CHECK_THROWS_AS(hartree_evolve(g, bad, PotentialSeries::cosine(g, 1, 0.5), 0.2, 0.01, 0.5), Error);
        PotentialSeries odd(g, 1);
        odd.set(1, cplx(0.0, 0.3));
        odd.set(-1, cplx(0.0, -0.3));
        CHECK_THROWS_AS(hartree_evolve(g, e, odd, 0.2, 0.01, 0.5), Error);
    }
    SUBCASE("second order against a dt/8 reference") {
        CVector psi = random_band_state(g, 5, rng);
        PotentialSeries V = PotentialSeries::cosine(g, 1, 1.0);
        auto ref = hartree_evolve(g, HartreeEnsemble::pure(psi), V, 1.0, 0.01 / 8, 0.5).states.back().states[0];
        double e1 = (hartree_evolve(g, HartreeEnsemble::pure(psi), V, 1.0, 0.02, 0.5).states.back().states[0] - ref).norm();
        double e2 = (hartree_evolve(g, HartreeEnsemble::pure(psi), V, 1.0, 0.01, 0.5).states.back().states[0] - ref).norm();
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
    }
}

TEST_CASE("nbody_evolve") {
    Grid g = make_grid(1, 8, 2 * kPi);
    std::mt19937_64 rng(13);
    const double hbar = 0.5;
    SUBCASE("N = 1 is free single-particle motion") {
        CVector psi = random_band_state(g, 3, rng);
        NBodyState s = NBodyState::product(g, 1, hbar, psi);
        NBodyState out = nbody_evolve(s, PotentialSeries::cosine(g, 1, 0.5), 1.0, 0.01);
        CVector ref = propagate_single(g, psi, PotentialTimeline(PotentialSeries::zero(g)), 0.0, 1.0, 0.01, hbar);
        for (int j = 0; j < 8; ++j) CHECK(std::abs(out.amps[j] - ref(j)) < 1e-12);
    }
    SUBCASE("free product state stays a product") {
        CVector psi = random_band_state(g, 3, rng);
        NBodyState out = nbody_evolve(NBodyState::product(g, 3, hbar, psi), PotentialSeries::zero(g), 1.0, 0.01);
        CVector p1 = propagate_single(g, psi, PotentialTimeline(PotentialSeries::zero(g)), 0.0, 1.0, 0.01, hbar);
        NBodyState want = NBodyState::product(g, 3, hbar, p1);
        double err = 0.0;
        for (size_t i = 0; i < want.amps.size(); ++i) err = std::max(err, std::abs(want.amps[i] - out.amps[i]));
        CHECK(err < 1e-10);
    }
    SUBCASE("unitarity, symmetry, second order against the dense exponential") {
        CVector psi = random_band_state(g, 3, rng);
        PotentialSeries V = two_mode(g);
        NBodyState s = NBodyState::product(g, 2, hbar, psi);
        CVector exact = expm_apply(nbody_hamiltonian(g, 2, V, hbar), s.unit_vector(), 1.0, hbar);
        double prev = 0.0;
        for (double dt : {0.02, 0.01, 0.005}) {
            NBodyState out = nbody_evolve(s, V, 1.0, dt);
            CHECK(std::abs(out.norm() - 1.0) < 1e-10);
            CHECK(out.symmetry_residual() < 1e-10);
            double err = (out.unit_vector() - exact).norm();
            if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.2));
            prev = err;
        }
    }
    SUBCASE("guards") {
        Grid big = make_grid(1, 64, 2 * kPi);
        CHECK_THROWS_AS(NBodyState::product(big, 5, hbar, CVector::Constant(64, 1.0)), Error);
        CHECK_THROWS_AS(nbody_hamiltonian(big, 3, PotentialSeries::zero(big), hbar), Error);
    }
}

TEST_CASE("nbody_propagator") {
    Grid g = make_grid(1, 8, 2 * kPi);
    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    const double hbar = 0.5;
    NBodyPropagator P(g, 2, V, hbar);
    CMatrix I = CMatrix::Identity(64, 64);
    CHECK(max_abs(P.at(0.0) - I) < 1e-12);
    CHECK(max_abs(P.at(0.7) * P.at(-0.7) - I) < 1e-10);
    CHECK(max_abs(P.at(0.7) * P.at(0.7).adjoint() - I) < 1e-10);
    // columns of U(t)^* = e^{-itH/hbar} against split-step on basis vectors
    CMatrix Ustar = P.at(0.5).adjoint();
    std::vector<double> errs;
    for (double dt : {0.01, 0.005}) {
        double worst = 0.0;
        for (int c : {0, 9, 27, 63}) {
            NBodyState e;
            e.grid = g;
            e.N = 2;
            e.hbar = hbar;
            e.amps.assign(64, 0.0);
            e.amps[c] = 1.0 / g.dx();  // unit vector scaled to sum |Psi|^2 dx^2 = 1
            NBodyState out = nbody_evolve(e, V, 0.5, dt);
            worst = std::max(worst, (out.unit_vector() - Ustar.col(c)).norm());
        }
        errs.push_back(worst);
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.25));
    CHECK(errs[1] < 1e-3);
}

TEST_CASE("marginals") {
    Grid g = make_grid(1, 8, 2 * kPi);
    std::mt19937_64 rng(19);
    CVector psi = random_band_state(g, 3, rng);
    NBodyState s = NBodyState::product(g, 3, 0.5, psi);
    GridOperator R = pure_density(g, psi);
    CHECK(max_abs(marginal1(s).mat - R.mat) < 1e-12);
    CHECK(max_abs(marginal2(s) - kron(R.mat, R.mat)) < 1e-12);

    // random state, N = 3: naive triple loop oracle
    NBodyState r = s;
    for (auto& a : r.amps) a = rand_c(rng);
    double nr = r.norm();
    for (auto& a : r.amps) a /= nr;
    CMatrix naive = CMatrix::Zero(8, 8);
    double dx3 = std::pow(g.dx(), 3);
    for (int x = 0; x < 8; ++x)
        for (int xp = 0; xp < 8; ++xp)
            for (int b = 0; b < 8; ++b)
                for (int c = 0; c < 8; ++c)
                    naive(x, xp) += r.amps[x * 64 + b * 8 + c] * std::conj(r.amps[xp * 64 + b * 8 + c]) * dx3;
    GridOperator F1 = marginal1(r);
    CHECK(max_abs(F1.mat - naive) < 1e-13);
    CHECK(std::abs(F1.mat.trace() - 1.0) < 1e-12);
    CHECK_NOTHROW(check_role(F1));

    CMatrix F2 = marginal2(r);
    CHECK(max_abs(partial_trace(F2, 8, 2, 1) - F1.mat) < 1e-12);
    CVector phi = r.unit_vector();
    CMatrix FN = phi * phi.adjoint();
    CHECK(max_abs(marginal1(FN, 8, 3) - F1.mat) < 1e-13);
    CHECK(max_abs(marginal2(FN, 8, 3) - F2) < 1e-13);
    for (int i = 0; i < 20; ++i) {
        CMatrix A2 = random_matrix(64, rng);
        CMatrix big = kron(A2, CMatrix::Identity(8, 8));
        cplx direct = (phi.adjoint() * big * phi)(0, 0);
        CHECK(std::abs((A2 * F2).trace() - direct) < 1e-11);
    }
    NBodyState one = NBodyState::product(g, 1, 0.5, psi);
    CHECK_THROWS_AS(marginal2(one), Error);
}

TEST_CASE("kernels: parallel variants reproduce the serial reference bit for bit") {
    std::mt19937_64 rng(23);
    const int M = 8, N = 4;
    std::vector<cplx> a(kernels::tensor_size(M, N));
    for (auto& v : a) v = rand_c(rng);
    std::vector<double> vd(M);
    for (auto& v : vd) v = rand_c(rng).real();
    Fft1d fft(M);
    std::vector<cplx> mult(M);
    for (auto& m : mult) m = rand_c(rng);

    auto s = a, p = a;
    kernels::serial::pair_phase(s, M, N, vd, 0.3);
    kernels::parallel::pair_phase(p, M, N, vd, 0.3);
    CHECK(s == p);
    kernels::serial::axis_multiplier(s, M, N, mult, fft);
    kernels::parallel::axis_multiplier(p, M, N, mult, fft);
    CHECK(s == p);
    CMatrix cs = kernels::serial::contract(s, M, N, 1, 0.5);
    CMatrix cp = kernels::parallel::contract(s, M, N, 1, 0.5);
    CHECK(cs == cp);
    CHECK(kernels::serial::contract(s, M, N, 2, 0.5) == kernels::parallel::contract(s, M, N, 2, 0.5));

    // axis multiplier against a dense Kronecker oracle
    CMatrix F = dft_matrix(M);
    CMatrix D = CMatrix::Zero(M, M);
    for (int i = 0; i < M; ++i) D(i, i) = mult[i];
    CMatrix T1 = F.adjoint() * D * F;  // unitary DFT already carries the normalization
    std::vector<cplx> mm = mult;
    for (auto& m : mm) m /= double(M);
    std::vector<cplx> two(a.begin(), a.begin() + M * M);
    kernels::serial::axis_multiplier(two, M, 2, mm, fft);
    CVector v(M * M);
    for (int i = 0; i < M * M; ++i) v(i) = a[i];
    CVector w = kron(T1, T1) * v;
    for (int i = 0; i < M * M; ++i) CHECK(std::abs(w(i) - two[i]) < 1e-12);
}

TEST_CASE("tensor size saturates") {
    CHECK(kernels::tensor_size(16, 3) == 4096);
    CHECK(kernels::tensor_size(16, 100) == std::numeric_limits<std::size_t>::max());
    Grid g = make_grid(1, 16, 2 * kPi);
    CHECK_THROWS_AS(NBodyState::product(g, 100, 1.0, CVector::Ones(16)), Error);
}
