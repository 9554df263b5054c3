#include "doctest.h"
#include "helpers.hpp"

#include "mfl/qemp.hpp"

using namespace mfl;
using namespace testing_util;

namespace {

CMatrix comm(const CMatrix& A, const CMatrix& B) { return A * B - B * A; }

CVector random_state(const Grid& g, std::mt19937_64& rng) {
    CVector psi(g.M);
    for (int j = 0; j < g.M; ++j) psi(j) = rand_c(rng);
    return psi / std::sqrt(psi.squaredNorm() * g.dx());
}

GridOperator op(const Grid& g, const CMatrix& A) { return {g, A, Role::generic}; }

// symmetrized Wishart density on (C^M)^{⊗N}
CMatrix random_symmetric_density(int M, int N, std::mt19937_64& rng) {
    int D = 1;
    for (int k = 0; k < N; ++k) D *= M;
    CMatrix F = symmetrize(random_density(D, rng), M, N);
    return F / F.trace();
}

CMatrix pair_potential(const Grid& g, int N, int k, int l, const PotentialSeries& V) {
    std::vector<double> v = V.on_grid();
    int D = int(std::pow(g.M, N));
    CMatrix P = CMatrix::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        std::vector<int> d(N);
        int r = i;
        for (int a = N - 1; a >= 0; --a) {
            d[a] = r % g.M;
            r /= g.M;
        }
        P(i, i) = v[((d[k] - d[l]) % g.M + g.M) % g.M];
    }
    return P;
}

}  // namespace

TEST_CASE("jk_embed and the empirical commutator identities") {
    std::mt19937_64 rng(11);
    const int M = 4;
    Grid g = probe_grid(M, 2 * kPi);
    CMatrix I = CMatrix::Identity(M, M);
    CHECK(max_abs(jk_embed(I, 2, 3) - CMatrix::Identity(64, 64)) == 0.0);
    CMatrix A = random_matrix(M, rng), B = random_matrix(M, rng);
    CHECK(max_abs(jk_embed(A, 1, 1) - A) == 0.0);
    CHECK(max_abs(jk_embed(A, 2, 3) - kron(I, kron(A, I))) == 0.0);
    CHECK(max_abs(jk_embed(A, 3, 3) - kron(kron(I, I), A)) == 0.0);
    CHECK_THROWS_AS(jk_embed(A, 0, 2), Error);
    CHECK_THROWS_AS(jk_embed(A, 3, 2), Error);
    CHECK_THROWS_AS(jk_embed(random_matrix(8, rng), 1, 5), Error);

    double worst = 0.0;
    for (int draw = 0; draw < 10; ++draw) {
        A = random_matrix(M, rng);
        B = random_matrix(M, rng);
        for (int N = 1; N <= 3; ++N) {
            for (int k = 1; k <= N; ++k)
                for (int l = 1; l <= N; ++l) {
                    CMatrix lhs = comm(jk_embed(A, k, N), jk_embed(B, l, N));
                    CMatrix rhs = k == l ? jk_embed(comm(A, B), k, N) : CMatrix::Zero(lhs.rows(), lhs.cols());
                    worst = std::max(worst, max_abs(lhs - rhs));
                }
            ObservableMap Min = empirical_in(g, N);
            worst = std::max(worst, max_abs(comm(Min.apply(A), Min.apply(B)) - Min.apply(comm(A, B)) / double(N)));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("empirical maps") {
    std::mt19937_64 rng(12);
    Grid g = probe_grid(4, 2 * kPi);
    CMatrix A = random_matrix(4, rng), B = random_matrix(4, rng);
    ObservableMap M3 = empirical_in(g, 3);
    CHECK(max_abs(M3.apply(CMatrix::Identity(4, 4)) - CMatrix::Identity(64, 64)) < 1e-15);
    CHECK(max_abs(empirical_in(g, 1).apply(A) - A) == 0.0);
    CMatrix oracle = (jk_embed(A, 1, 3) + jk_embed(A, 2, 3) + jk_embed(A, 3, 3)) / 3.0;
    CHECK(max_abs(M3.apply(A) - oracle) < 1e-15);
    cplx a(0.3, -1.2), b(2.0, 0.5);
    CHECK(max_abs(M3.apply(CMatrix(a * A + b * B)) - a * M3.apply(A) - b * M3.apply(B)) < 1e-12);

    SUBCASE("conjugated by a propagator") {
        CHECK(max_abs(empirical_t(g, 3, CMatrix::Identity(64, 64)).apply(A) - M3.apply(A)) < 1e-15);
        CHECK_THROWS_AS(empirical_t(g, 3, CMatrix(2.0 * CMatrix::Identity(64, 64))), Error);
        CHECK_THROWS_AS(empirical_t(g, 3, CMatrix::Identity(16, 16)), Error);
        PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
        CMatrix U = nbody_propagator(g, 3, V, 0.7, 0.5);
        ObservableMap Mt = empirical_t(g, 3, U);
        CHECK(std::abs(op_norm(Mt.apply(A)) - op_norm(M3.apply(A))) < 1e-12);
        CHECK(op_norm(Mt.apply(A)) <= op_norm(A) + 1e-12);
        CHECK(max_abs(Mt.apply(CMatrix(a * A + b * B)) - a * Mt.apply(A) - b * Mt.apply(B)) < 1e-12);

        AlgebraSetup s{g, 3, V, 0.5, random_state(g, rng)};
        for (int i = 0; i < 10; ++i) {
            PairCheck c = heisenberg_duality_check(s, 0.4, op(g, random_matrix(4, rng)));
            CHECK(c.residual < 1e-10);
        }
    }
    SUBCASE("rmap") {
        CVector psi = random_state(g, rng);
        GridOperator R = pure_density(g, psi);
        ObservableMap L = rmap(R, 2);
        CHECK(max_abs(L.apply(CMatrix::Identity(4, 4)) - CMatrix::Identity(16, 16)) < 1e-14);
        cplx expect = psi.dot(A * psi) * g.dx();
        CHECK(std::abs(L.apply(A)(0, 0) - expect) < 1e-13);
        CHECK(max_abs(L.apply(A) - expect * CMatrix::Identity(16, 16)) < 1e-13);
        CHECK(max_abs(L.apply(CMatrix(a * A + b * B)) - a * L.apply(A) - b * L.apply(B)) < 1e-12);
        CHECK_THROWS_AS(rmap(op(g, A), 2), Error);
        CHECK_THROWS_AS(rmap(GridOperator{g, CMatrix(2.0 * R.mat), Role::density}, 2), Error);
    }
    SUBCASE("sums and scaling") {
        ObservableMap L = rmap(GridOperator{g, random_density(4, rng), Role::density}, 3);
        ObservableMap S = M3 - cplx(0.5) * L;
        CHECK(S.kind() == ObservableMap::Kind::sum);
        CHECK(max_abs(S.apply(A) - (M3.apply(A) - 0.5 * L.apply(A))) < 1e-14);
        CHECK_THROWS_AS(M3 + empirical_in(g, 2), Error);
    }
}

TEST_CASE("ad_star and the twisted interaction") {
    std::mt19937_64 rng(13);
    Grid g = probe_grid(4, 2 * kPi);
    ObservableMap M2 = empirical_in(g, 2);
    GridOperator A = op(g, random_matrix(4, rng));
    CHECK(max_abs(ad_star(op(g, CMatrix::Identity(4, 4)), M2, A)) == 0.0);
    CMatrix D1 = CMatrix::Zero(4, 4), D2 = CMatrix::Zero(4, 4);
    for (int j = 0; j < 4; ++j) {
        D1(j, j) = rand_c(rng);
        D2(j, j) = rand_c(rng);
    }
    CHECK(max_abs(ad_star(op(g, D1), M2, op(g, D2))) < 1e-15);
    GridOperator D = op(g, random_matrix(4, rng));
    CHECK(max_abs(ad_star(D, M2, A) + M2.apply(comm(D.mat, A.mat))) < 1e-13);

    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    V.set(2, 0.2);
    V.set(-2, 0.2);
    CHECK(max_abs(interaction(PotentialSeries::zero(g), M2, M2, A)) == 0.0);
    PotentialSeries odd(g, 1);
    odd.set(1, cplx(0.0, 0.3));
    odd.set(-1, cplx(0.0, -0.3));
    CHECK_THROWS_AS(interaction(odd, M2, M2, A), Error);

    SUBCASE("pair-potential oracle") {
        for (int N = 2; N <= 3; ++N) {
            ObservableMap MN = empirical_in(g, N);
            CMatrix want = CMatrix::Zero(int(std::pow(4, N)), int(std::pow(4, N)));
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < N; ++l)
                    if (k != l) want += comm(pair_potential(g, N, k, l, V), jk_embed(A.mat, l + 1, N));
            want /= double(N * N);
            CHECK(max_abs(interaction(V, MN, MN, A) - want) < 1e-12);
        }
    }
    SUBCASE("mean-field reduction") {
        GridOperator R{g, random_density(4, rng), Role::density};
        PotentialSeries VR = meanfield_potential(V, R);
        GridOperator VRop = op(g, VR.on_grid().empty() ? CMatrix() : CMatrix::Zero(4, 4));
        std::vector<double> vr = VR.on_grid();
        for (int j = 0; j < 4; ++j) VRop.mat(j, j) = vr[j];
        ObservableMap L = rmap(R, 2);
        CHECK(max_abs(interaction(V, L, L, A) + ad_star(VRop, L, A)) < 1e-12);
        ObservableMap Mt = empirical_t(g, 2, nbody_propagator(g, 2, V, 0.3, 0.5));
        CHECK(max_abs(interaction(V, L, Mt, A) + ad_star(VRop, Mt, A)) < 1e-12);
    }
    SUBCASE("norm bound and bilinearity") {
        double tv = 0.0;
        for (int m = -V.mmax(); m <= V.mmax(); ++m) tv += std::abs(V.hat(m));
        ObservableMap Mt = empirical_t(g, 2, nbody_propagator(g, 2, V, 0.5, 0.5));
        for (int i = 0; i < 5; ++i) {
            GridOperator B = op(g, random_matrix(4, rng));
            CHECK(op_norm(interaction(V, Mt, M2, B)) <= 2.0 * op_norm(B.mat) * tv + 1e-12);
        }
        ObservableMap L = rmap(GridOperator{g, random_density(4, rng), Role::density}, 2);
        cplx a(0.7, 0.2), b(-1.1, 0.4);
        ObservableMap mix = a * M2 + b * L;
        CMatrix lhs = interaction(V, mix, Mt, A);
        CMatrix rhs = a * interaction(V, M2, Mt, A) + b * interaction(V, L, Mt, A);
        CHECK(max_abs(lhs - rhs) < 1e-12);
        lhs = interaction(V, Mt, mix, A);
        rhs = a * interaction(V, Mt, M2, A) + b * interaction(V, Mt, L, A);
        CHECK(max_abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("interaction term of the first hierarchy equation") {
    std::mt19937_64 rng(14);
    Grid g = probe_grid(4, 2 * kPi);
    AlgebraSetup s{g, 3, PotentialSeries::cosine(g, 1, 0.5), 0.5, random_state(g, rng)};
    GridOperator A = op(g, random_hermitian(4, rng));
    PairCheck c = hierarchy_interaction_check(s, 0.3, A);
    CHECK(c.residual < 1e-9);
    CHECK(std::abs(c.lhs) > 1e-4);
    PairCheck c0 = hierarchy_interaction_check(s, 0.0, op(g, CMatrix::Identity(4, 4)));
    CHECK(std::abs(c0.lhs) < 1e-14);
    CHECK(std::abs(c0.rhs) < 1e-14);
    AlgebraSetup free{g, 2, PotentialSeries::zero(g), 0.5, s.psi_in};
    PairCheck cf = hierarchy_interaction_check(free, 0.3, A);
    CHECK(std::abs(cf.lhs) < 1e-14);
    CHECK(std::abs(cf.rhs) < 1e-14);
}

TEST_CASE("slot permutations and the quadratic marginal identity") {
    std::mt19937_64 rng(15);
    const int M = 4;
    CMatrix A = random_matrix(M, rng), B = random_matrix(M, rng);
    CMatrix G = random_matrix(64, rng);
    CHECK(max_abs(swap_slots(swap_slots(G, M, 3, 0, 2), M, 3, 0, 2) - G) == 0.0);
    CMatrix K = kron(A, kron(B, CMatrix::Identity(M, M)));
    CHECK(max_abs(swap_slots(K, M, 3, 0, 1) - kron(B, kron(A, CMatrix::Identity(M, M)))) == 0.0);
    CMatrix S = symmetrize(G, M, 3);
    CHECK(swap_asymmetry(S, M, 3) < 1e-14);
    CHECK(swap_asymmetry(G, M, 3) > 1e-3);

    CMatrix F1 = random_density(M, rng);
    CHECK(quadratic_marginal_check(1, A, B, F1) < 1e-13);
    CMatrix F = random_symmetric_density(M, 3, rng);
    CHECK(quadratic_marginal_check(3, CMatrix::Identity(M, M), CMatrix::Identity(M, M), F) < 1e-13);
    for (int i = 0; i < 5; ++i) CHECK(quadratic_marginal_check(3, random_matrix(M, rng), random_matrix(M, rng), F) < 1e-11);
    CMatrix Fa = random_density(64, rng);
    CHECK_THROWS_AS(quadratic_marginal_check(3, A, B, Fa), Error);
}

TEST_CASE("evolution equation for the empirical measure") {
    std::mt19937_64 rng(16);
    Grid g = make_grid(1, 8, 2 * kPi);
    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    AlgebraSetup s{g, 2, V, 0.5, random_state(g, rng)};
    SUBCASE("static case") {
        AlgebraSetup free{g, 2, PotentialSeries::zero(g), 0.5, s.psi_in};
        CMatrix F = dft_matrix(8);
        CVector diag(8);
        for (int j = 0; j < 8; ++j) diag(j) = rand_c(rng);
        GridOperator A = op(g, F.adjoint() * diag.asDiagonal() * F);
        CHECK(empirical_equation_residual(free, A, 0.4, 1e-3) < 1e-9);
    }
    SUBCASE("second order and size") {
        // full-band probes converge at the same rate but carry the (2 k_max^2)^3 truncation constant
        GridOperator A = op(g, random_hermitian(8, rng));
        A.mat /= op_norm(A.mat);
        double r1 = empirical_equation_residual(s, A, 0.5, 2e-3);
        double r2 = empirical_equation_residual(s, A, 0.5, 1e-3);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
        CHECK(r2 < 1e-5);
        CMatrix P = band_projector(g, 2);
        GridOperator Ab = op(g, P * random_hermitian(8, rng) * P);
        Ab.mat /= op_norm(Ab.mat);
        CHECK(empirical_equation_residual(s, Ab, 0.5, 1e-3) < 1e-6);
    }
    SUBCASE("error evolution") {
        // i hbar d/dt (M - R) = ad*(K + V_R)(M - R) - C[V, M - R, M]
        double dt = 1.25e-4;
        auto tr = hartree_evolve(g, HartreeEnsemble::pure(s.psi_in), V, 1.0, dt, 0.5);
        NBodyPropagator P(g, 2, V, 0.5);
        GridOperator A = op(g, random_hermitian(8, rng));
        auto err = [&](double t) {
            return empirical_t(g, 2, P.at(t)) - rmap(tr.density(tr.node_of(t)), 2);
        };
        auto residual = [&](double delta) {
            double t = 0.5;
            GridOperator R = tr.density(tr.node_of(t));
            PotentialSeries VR = meanfield_potential(V, R);
            std::vector<double> vr = VR.on_grid();
            CMatrix gen = kinetic_matrix(g, 0.5);
            for (int j = 0; j < 8; ++j) gen(j, j) += vr[j];
            ObservableMap E0 = err(t), Mt = empirical_t(g, 2, P.at(t));
            CMatrix r = kI * 0.5 * (err(t + delta).apply(A) - err(t - delta).apply(A)) / (2 * delta) -
                        ad_star(op(g, gen), E0, A) + interaction(V, E0, Mt, A);
            return op_norm(r);
        };
        double r1 = residual(4e-3), r2 = residual(2e-3);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.3));
    }
}

TEST_CASE("hartree dynamics as a special solution") {
    std::mt19937_64 rng(17);
    Grid g = make_grid(1, 8, 2 * kPi);
    SUBCASE("free plane wave") {
        CVector psi(8);
        for (int j = 0; j < 8; ++j) psi(j) = std::polar(1.0 / std::sqrt(g.L), 2.0 * g.node(j));
        auto tr = hartree_evolve(g, HartreeEnsemble::pure(psi), PotentialSeries::zero(g), 1.0, 1e-3, 0.5);
        CHECK(hartree_as_special_case(tr, PotentialSeries::zero(g), op(g, random_matrix(8, rng)), 0.5, 1e-3) < 1e-9);
    }
    PotentialSeries V = PotentialSeries::cosine(g, 1, 0.5);
    CVector psi = random_band_state(g, 3, rng);
    GridOperator A = op(g, random_hermitian(8, rng));
    A.mat /= op_norm(A.mat);
    auto tr = hartree_evolve(g, HartreeEnsemble::pure(psi), V, 1.0, 1.25e-4, 0.5);
    CHECK(hartree_as_special_case(tr, V, op(g, CMatrix::Identity(8, 8)), 0.5, 1e-3) < 1e-12);
    double r2 = hartree_as_special_case(tr, V, A, 0.5, 2e-3, 2);
    double r1 = hartree_as_special_case(tr, V, A, 0.5, 1e-3, 2);
    CHECK(r1 < 1e-5);
    CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.25));
    MESSAGE("hartree residual at 1e-3: " << r1);
}

TEST_CASE("initial fluctuation identity") {
    std::mt19937_64 rng(18);
    Grid g6 = probe_grid(6, 2 * kPi);
    GridOperator R{g6, random_density(6, rng), Role::density};
    CMatrix B = random_matrix(6, rng);
    CMatrix F = random_symmetric_density(6, 2, rng);
    Fluctuation f = initial_fluctuation_identity(2, B, F, R);
    CHECK(f.residual < 1e-11);
    Fluctuation fi = initial_fluctuation_identity(2, CMatrix::Identity(6, 6), F, R);
    CHECK(std::abs(fi.lhs) < 1e-13);
    CHECK(std::abs(fi.rhs) < 1e-13);

    // factorized data
    Grid g = probe_grid(4, 2 * kPi);
    CVector psi = random_state(g, rng);
    GridOperator Rp = pure_density(g, psi);
    CMatrix F3 = kron(Rp.mat, kron(Rp.mat, Rp.mat));
    CMatrix C = random_matrix(4, rng);
    cplx b = (C * Rp.mat).trace();
    double want = ((C.adjoint() * C * Rp.mat).trace().real() - std::norm(b)) / 3.0;
    Fluctuation ff = initial_fluctuation_identity(3, C, F3, Rp);
    CHECK(std::abs(ff.lhs - want) < 1e-12);
    CHECK(std::abs(ff.rhs - want) < 1e-12);

    // matrix-free path against the dense one
    NBodyState st = NBodyState::product(g, 3, 1.0, psi);
    Fluctuation fp = initial_fluctuation_identity(st, C, Rp);
    CHECK(std::abs(fp.lhs - ff.lhs) < 1e-12);
    CHECK(fp.residual < 1e-12);

    CHECK_THROWS_AS(initial_fluctuation_identity(2, B, random_density(36, rng), R), Error);
}
