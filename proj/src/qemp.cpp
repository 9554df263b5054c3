#include "mfl/qemp.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "mfl/kernels.hpp"
#include "mfl/phasespace.hpp"

namespace mfl {

struct ObservableMap::Node {
    Kind kind;
    Grid grid;
    int N = 1;
    CMatrix mat;  // U, R or D depending on kind
    std::optional<PotentialSeries> V;
    cplx scale = 1.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

int dense_dim(int M, int N, const char* who) {
    if (N < 1) throw Error(std::string(who) + ": N must be >= 1");
    std::size_t dim = kernels::tensor_size(M, N);
    if (dim > std::size_t(kMaxDenseDim))
        throw Error(std::string(who) + ": dimension " + std::to_string(dim) + " exceeds the dense limit");
    return int(dim);
}

void require_one_particle(const Grid& g, const CMatrix& A, const char* who) {
    if (A.rows() != g.M || A.cols() != g.M) throw Error(std::string(who) + ": operator is not M x M");
}

// J_k A accumulated into out with weight w (k 0-based)
void add_embedded(CMatrix& out, const CMatrix& A, int k, int N, cplx w) {
    const int M = int(A.rows());
    const int inner = int(kernels::tensor_size(M, N - k - 1));
    const int outer = int(kernels::tensor_size(M, k));
    for (int o = 0; o < outer; ++o)
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) {
                cplx v = w * A(a, b);
                if (v == cplx(0.0)) continue;
                int r0 = (o * M + a) * inner, c0 = (o * M + b) * inner;
                for (int in = 0; in < inner; ++in) out(r0 + in, c0 + in) += v;
            }
}

std::vector<int> digits_of(int i, int M, int N) {
    std::vector<int> d(N);
    for (int a = N - 1; a >= 0; --a) {
        d[a] = i % M;
        i /= M;
    }
    return d;
}

int index_of_digits(const std::vector<int>& d, int M) {
    int i = 0;
    for (int v : d) i = i * M + v;
    return i;
}

// permutation of basis indices induced by moving slot a to slot sigma[a]
std::vector<int> slot_permutation(const std::vector<int>& sigma, int M, int N) {
    int D = int(kernels::tensor_size(M, N));
    std::vector<int> p(D);
    std::vector<int> e(N);
    for (int i = 0; i < D; ++i) {
        auto d = digits_of(i, M, N);
        for (int a = 0; a < N; ++a) e[sigma[a]] = d[a];
        p[i] = index_of_digits(e, M);
    }
    return p;
}

BigOperator permute(const BigOperator& F, const std::vector<int>& p) {
    BigOperator out(F.rows(), F.cols());
    for (Eigen::Index j = 0; j < F.cols(); ++j)
        for (Eigen::Index i = 0; i < F.rows(); ++i) out(p[i], p[j]) = F(i, j);
    return out;
}

std::shared_ptr<ObservableMap::Node> make_node(ObservableMap::Kind k, const Grid& g, int N) {
    auto n = std::make_shared<ObservableMap::Node>();
    n->kind = k;
    n->grid = g;
    n->N = N;
    return n;
}

void require_compatible(const ObservableMap& a, const ObservableMap& b, const char* who) {
    if (!(a.grid() == b.grid()) || a.N() != b.N()) throw Error(std::string(who) + ": maps act on different spaces");
}

cplx trace_product(const CMatrix& A, const CMatrix& B) {  // tr(A B)
    return (A.transpose().cwiseProduct(B)).sum();
}

}  // namespace

BigOperator jk_embed(const CMatrix& A, int k, int N) {
    if (A.rows() != A.cols()) throw Error("jk_embed: operator is not square");
    if (k < 1 || k > N) throw Error("jk_embed: slot index out of range");
    int D = dense_dim(int(A.rows()), N, "jk_embed");
    BigOperator out = BigOperator::Zero(D, D);
    add_embedded(out, A, k - 1, N, 1.0);
    return out;
}

ObservableMap::Kind ObservableMap::kind() const { return node_->kind; }
int ObservableMap::N() const { return node_->N; }
const Grid& ObservableMap::grid() const { return node_->grid; }

BigOperator ObservableMap::apply(const CMatrix& A) const {
    const Node& n = *node_;
    require_one_particle(n.grid, A, "ObservableMap::apply");
    const int D = int(kernels::tensor_size(n.grid.M, n.N));
    switch (n.kind) {
        case Kind::empirical_in: {
            BigOperator out = BigOperator::Zero(D, D);
            for (int k = 0; k < n.N; ++k) add_embedded(out, A, k, n.N, 1.0 / n.N);
            return out;
        }
        case Kind::empirical_t: {
            BigOperator in = BigOperator::Zero(D, D);
            for (int k = 0; k < n.N; ++k) add_embedded(in, A, k, n.N, 1.0 / n.N);
            return n.mat * in * n.mat.adjoint();
        }
        case Kind::rmap:
            return trace_product(n.mat, A) * BigOperator::Identity(D, D);
        case Kind::adstar:
            return -ObservableMap(n.a).apply(CMatrix(n.mat * A - A * n.mat));
        case Kind::interaction: {
            ObservableMap L1(n.a), L2(n.b);
            BigOperator out = BigOperator::Zero(D, D);
            const PotentialSeries& V = *n.V;
            for (int m = -V.mmax(); m <= V.mmax(); ++m) {
                cplx vm = V.hat(m);
                if (vm == cplx(0.0)) continue;
                CMatrix E = mod_op(n.grid, n.grid.omega(m)).mat;
                BigOperator l1 = L1.apply(CMatrix(E.adjoint()));
                out += vm * (l1 * L2.apply(CMatrix(E * A)) - L2.apply(CMatrix(A * E)) * l1);
            }
            return out;
        }
        case Kind::sum:
            return ObservableMap(n.a).apply(A) + ObservableMap(n.b).apply(A);
        case Kind::scaled:
            return n.scale * ObservableMap(n.a).apply(A);
    }
    throw Error("ObservableMap: unknown kind");
}

ObservableMap operator+(const ObservableMap& a, const ObservableMap& b) {
    require_compatible(a, b, "ObservableMap +");
    auto n = make_node(ObservableMap::Kind::sum, a.grid(), a.N());
    n->a = a.ptr();
    n->b = b.ptr();
    return ObservableMap(n);
}

ObservableMap operator*(cplx s, const ObservableMap& a) {
    auto n = make_node(ObservableMap::Kind::scaled, a.grid(), a.N());
    n->scale = s;
    n->a = a.ptr();
    return ObservableMap(n);
}

ObservableMap operator-(const ObservableMap& a, const ObservableMap& b) { return a + cplx(-1.0) * b; }

ObservableMap empirical_in(const Grid& g, int N) {
    dense_dim(g.M, N, "empirical_in");
    return ObservableMap(make_node(ObservableMap::Kind::empirical_in, g, N));
}

ObservableMap empirical_t(const Grid& g, int N, const BigOperator& U) {
    int D = dense_dim(g.M, N, "empirical_t");
    if (U.rows() != D || U.cols() != D) throw Error("empirical_t: propagator has the wrong dimension");
    check_role(GridOperator{g, U, Role::unitary});
    auto n = make_node(ObservableMap::Kind::empirical_t, g, N);
    n->mat = U;
    return ObservableMap(n);
}

ObservableMap rmap(const GridOperator& R, int N) {
    if (R.role != Role::density) throw Error("rmap: operator is not tagged as a density");
    check_role(R);
    dense_dim(R.grid.M, N, "rmap");
    auto n = make_node(ObservableMap::Kind::rmap, R.grid, N);
    n->mat = R.mat;
    return ObservableMap(n);
}

ObservableMap ad_star_map(const GridOperator& D, const ObservableMap& inner) {
    require_one_particle(inner.grid(), D.mat, "ad_star");
    auto n = make_node(ObservableMap::Kind::adstar, inner.grid(), inner.N());
    n->mat = D.mat;
    n->a = inner.ptr();
    return ObservableMap(n);
}

ObservableMap interaction_map(const PotentialSeries& V, const ObservableMap& L1, const ObservableMap& L2) {
    V.require_even_real("interaction");
    require_compatible(L1, L2, "interaction");
    if (!(V.grid() == L1.grid())) throw Error("interaction: potential lives on another grid");
    auto n = make_node(ObservableMap::Kind::interaction, L1.grid(), L1.N());
    n->V = V;
    n->a = L1.ptr();
    n->b = L2.ptr();
    return ObservableMap(n);
}

BigOperator ad_star(const GridOperator& D, const ObservableMap& L, const GridOperator& A) {
    return ad_star_map(D, L).apply(A);
}

BigOperator interaction(const PotentialSeries& V, const ObservableMap& L1, const ObservableMap& L2,
                        const GridOperator& A) {
    return interaction_map(V, L1, L2).apply(A);
}

BigOperator swap_slots(const BigOperator& F, int M, int N, int k, int l) {
    if (k < 0 || l < 0 || k >= N || l >= N) throw Error("swap_slots: slot out of range");
    std::vector<int> sigma(N);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::swap(sigma[k], sigma[l]);
    return permute(F, slot_permutation(sigma, M, N));
}

double swap_asymmetry(const BigOperator& F, int M, int N) {
    double r = 0.0;
    for (int k = 0; k < N; ++k)
        for (int l = k + 1; l < N; ++l) r = std::max(r, (swap_slots(F, M, N, k, l) - F).cwiseAbs().maxCoeff());
    return r;
}

BigOperator symmetrize(const BigOperator& F, int M, int N) {
    std::vector<int> sigma(N);
    std::iota(sigma.begin(), sigma.end(), 0);
    BigOperator out = BigOperator::Zero(F.rows(), F.cols());
    int count = 0;
    do {
        out += permute(F, slot_permutation(sigma, M, N));
        ++count;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return out / double(count);
}

namespace {

struct Evolved {
    CVector phi;   // F_in = phi phi^dagger
    CMatrix U;     // U_N(t)
};

Evolved evolve_setup(const AlgebraSetup& s, double t) {
    dense_dim(s.grid.M, s.N, "algebra setup");
    if (s.psi_in.size() != s.grid.M) throw Error("algebra setup: initial state has the wrong size");
    NBodyPropagator P(s.grid, s.N, s.V, s.hbar);
    return {NBodyState::product(s.grid, s.N, s.hbar, s.psi_in).unit_vector(), P.at(t)};
}

}  // namespace

PairCheck heisenberg_duality_check(const AlgebraSetup& s, double t, const GridOperator& A) {
    require_one_particle(s.grid, A.mat, "heisenberg_duality_check");
    Evolved e = evolve_setup(s, t);
    CVector phit = e.U.adjoint() * e.phi;  // F_N(t) = U^dagger F_in U
    CMatrix F1 = marginal1(CMatrix(phit * phit.adjoint()), s.grid.M, s.N);
    cplx lhs = trace_product(A.mat, F1);
    cplx rhs = e.phi.dot(empirical_t(s.grid, s.N, e.U).apply(A) * e.phi);
    return {lhs, rhs, std::abs(lhs - rhs)};
}

PairCheck hierarchy_interaction_check(const AlgebraSetup& s, double t, const GridOperator& A) {
    require_one_particle(s.grid, A.mat, "hierarchy_interaction_check");
    s.V.require_even_real("hierarchy_interaction_check");
    const int M = s.grid.M;
    Evolved e = evolve_setup(s, t);
    cplx lhs = 0.0;
    if (s.N >= 2) {
        CVector phit = e.U.adjoint() * e.phi;
        CMatrix F2 = marginal2(CMatrix(phit * phit.adjoint()), M, s.N);
        std::vector<double> v = s.V.on_grid();
        CMatrix V12 = CMatrix::Zero(M * M, M * M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) V12(i * M + j, i * M + j) = v[((i - j) % M + M) % M];
        CMatrix AI = kron(A.mat, CMatrix::Identity(M, M));
        lhs = double(s.N - 1) / s.N * trace_product(CMatrix(V12 * AI - AI * V12), F2);
    }
    ObservableMap Mt = empirical_t(s.grid, s.N, e.U);
    cplx rhs = e.phi.dot(interaction(s.V, Mt, Mt, A) * e.phi);
    return {lhs, rhs, std::abs(lhs - rhs)};
}

double quadratic_marginal_check(int N, const CMatrix& A, const CMatrix& B, const BigOperator& F) {
    const int M = int(A.rows());
    if (B.rows() != M || A.cols() != M || B.cols() != M) throw Error("quadratic_marginal_check: A and B must be M x M");
    dense_dim(M, N, "quadratic_marginal_check");
    if (F.rows() != Eigen::Index(kernels::tensor_size(M, N))) throw Error("quadratic_marginal_check: F has the wrong dimension");
    if (swap_asymmetry(F, M, N) > 1e-8) throw Error("quadratic_marginal_check: F is not symmetric under particle exchange");
    Grid g = probe_grid(M, 1.0);
    ObservableMap Min = empirical_in(g, N);
    cplx lhs = trace_product(CMatrix(Min.apply(A) * Min.apply(B)), F);
    cplx rhs = trace_product(CMatrix(A * B), marginal1(F, M, N)) / double(N);
    if (N >= 2) rhs += double(N - 1) / N * trace_product(kron(A, B), marginal2(F, M, N));
    return std::abs(lhs - rhs);
}

double empirical_equation_residual(const AlgebraSetup& s, const GridOperator& A, double t, double delta) {
    require_one_particle(s.grid, A.mat, "empirical_equation_residual");
    s.V.require_even_real("empirical_equation_residual");
    if (!(delta > 0.0)) throw Error("empirical_equation_residual: delta must be positive");
    dense_dim(s.grid.M, s.N, "empirical_equation_residual");
    NBodyPropagator P(s.grid, s.N, s.V, s.hbar);
    ObservableMap Mp = empirical_t(s.grid, s.N, P.at(t + delta));
    ObservableMap Mm = empirical_t(s.grid, s.N, P.at(t - delta));
    ObservableMap M0 = empirical_t(s.grid, s.N, P.at(t));
    GridOperator K{s.grid, kinetic_matrix(s.grid, s.hbar), Role::generic};
    BigOperator r = kI * s.hbar * (Mp.apply(A) - Mm.apply(A)) / (2.0 * delta) - ad_star(K, M0, A) +
                    interaction(s.V, M0, M0, A);
    return op_norm(r);
}

double hartree_as_special_case(const HartreeTrajectory& tr, const PotentialSeries& V, const GridOperator& A,
                               double t, double delta, int N) {
    require_one_particle(tr.grid, A.mat, "hartree_as_special_case");
    if (!(delta > 0.0)) throw Error("hartree_as_special_case: delta must be positive");
    ObservableMap Lp = rmap(tr.density(tr.node_of(t + delta)), N);
    ObservableMap Lm = rmap(tr.density(tr.node_of(t - delta)), N);
    ObservableMap L0 = rmap(tr.density(tr.node_of(t)), N);
    GridOperator K{tr.grid, kinetic_matrix(tr.grid, tr.hbar), Role::generic};
    BigOperator r = kI * tr.hbar * (Lp.apply(A) - Lm.apply(A)) / (2.0 * delta) - ad_star(K, L0, A) +
                    interaction(V, L0, L0, A);
    return op_norm(r);
}

namespace {

Fluctuation fluctuation_rhs(int N, const CMatrix& B, const CMatrix& F1, const CMatrix* F2, const CMatrix& R,
                            double lhs) {
    cplx b = trace_product(B, F1);
    double rhs = (trace_product(CMatrix(B.adjoint() * B), F1).real() - std::norm(b)) / N;
    if (N >= 2) {
        CMatrix BB = kron(CMatrix(B.adjoint()), B);
        rhs += double(N - 1) / N * (trace_product(BB, *F2) - std::conj(b) * b).real();
    }
    rhs += std::norm(trace_product(B, CMatrix(F1 - R)));
    return {lhs, rhs, std::abs(lhs - rhs)};
}

}  // namespace

Fluctuation initial_fluctuation_identity(int N, const CMatrix& B, const BigOperator& F, const GridOperator& R) {
    const int M = R.grid.M;
    require_one_particle(R.grid, B, "initial_fluctuation_identity");
    int D = dense_dim(M, N, "initial_fluctuation_identity");
    if (F.rows() != D || F.cols() != D) throw Error("initial_fluctuation_identity: F has the wrong dimension");
    if (swap_asymmetry(F, M, N) > 1e-8)
        throw Error("initial_fluctuation_identity: F is not symmetric under particle exchange");
    BigOperator X = empirical_in(R.grid, N).apply(B) - trace_product(R.mat, B) * BigOperator::Identity(D, D);
    double lhs = trace_product(CMatrix(X.adjoint() * X), F).real();
    CMatrix F1 = marginal1(F, M, N);
    CMatrix F2;
    if (N >= 2) F2 = marginal2(F, M, N);
    return fluctuation_rhs(N, B, F1, &F2, R.mat, lhs);
}

std::vector<cplx> apply_empirical(const std::vector<cplx>& amps, int M, int N, const CMatrix& B) {
    const long D = long(kernels::tensor_size(M, N));
    if (long(amps.size()) != D) throw Error("apply_empirical: amplitude count is not M^N");
    std::vector<cplx> out(amps.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < D; ++i) {
        cplx s = 0.0;
        long stride = D / M;
        for (int k = 0; k < N; ++k, stride /= M) {
            int dk = int((i / stride) % M);
            long base = i - dk * stride;
            for (int c = 0; c < M; ++c) s += B(dk, c) * amps[base + c * stride];
        }
        out[i] = s / double(N);
    }
    return out;
}

Fluctuation initial_fluctuation_identity(const NBodyState& psi, const CMatrix& B, const GridOperator& R) {
    require_one_particle(psi.grid, B, "initial_fluctuation_identity");
    if (!(R.grid == psi.grid)) throw Error("initial_fluctuation_identity: R lives on another grid");
    CVector phi = psi.unit_vector();
    std::vector<cplx> v(phi.data(), phi.data() + phi.size());
    std::vector<cplx> x = apply_empirical(v, psi.grid.M, psi.N, B);
    cplx c = trace_product(R.mat, B);
    double lhs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lhs += std::norm(x[i] - c * v[i]);
    CMatrix F1 = marginal1(psi).mat;
    CMatrix F2;
    if (psi.N >= 2) F2 = marginal2(psi);
    return fluctuation_rhs(psi.N, B, F1, &F2, R.mat, lhs);
}

}  // namespace mfl
