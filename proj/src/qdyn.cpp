#include "mfl/qdyn.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/fft.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

long step_count(double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw Error("time step must be positive");
    double span = std::abs(t1 - t0);
    double n = std::round(span / dt);
    if (std::abs(n * dt - span) > 1e-9 * std::max(1.0, span))
        throw Error("time step " + std::to_string(dt) + " does not divide the interval " + std::to_string(span));
    return long(n);
}

namespace {

std::vector<cplx> kinetic_multiplier(const Grid& g, double hbar, double dt) {
    std::vector<cplx> mult(g.M);
    for (int j = 0; j < g.M; ++j) mult[j] = std::polar(1.0 / g.M, -0.5 * hbar * g.freq(j) * g.freq(j) * dt);
    return mult;
}

void potential_phase(CVector& psi, const std::vector<double>& v, double dt, double hbar) {
    for (Eigen::Index j = 0; j < psi.size(); ++j) psi(j) *= std::polar(1.0, -v[j] * dt / (2.0 * hbar));
}

void kinetic_step(CVector& psi, const std::vector<cplx>& mult, const Fft1d& fft) {
    fft.forward(psi.data());
    for (Eigen::Index j = 0; j < psi.size(); ++j) psi(j) *= mult[j];
    fft.backward(psi.data());
}

}  // namespace

CVector propagate_single(const Grid& g, const CVector& psi, const PotentialTimeline& V, double t0, double t1,
                         double dt, double hbar) {
    if (psi.size() != g.M) throw Error("propagate_single: wavefunction size does not match the grid");
    long n = step_count(t0, t1, dt);
    V.require_cover(t0, t1, "propagate_single");
    double h = (t1 >= t0) ? dt : -dt;
    Fft1d fft(g.M);
    auto mult = kinetic_multiplier(g, hbar, h);
    CVector out = psi;
    std::vector<double> fixed;
    if (V.is_static()) fixed = V.at(t0).on_grid();
    for (long s = 0; s < n; ++s) {
        double tm = t0 + (double(s) + 0.5) * h;
        std::vector<double> v = V.is_static() ? fixed : V.at(tm).on_grid();
        potential_phase(out, v, h, hbar);
        kinetic_step(out, mult, fft);
        potential_phase(out, v, h, hbar);
    }
    return out;
}

CMatrix propagator_matrix(const Grid& g, const PotentialTimeline& V, double t0, double t1, double dt, double hbar) {
    long n = step_count(t0, t1, dt);
    V.require_cover(t0, t1, "propagator_matrix");
    double h = (t1 >= t0) ? dt : -dt;
    Fft1d fft(g.M);
    auto mult = kinetic_multiplier(g, hbar, h);
    CMatrix U = CMatrix::Identity(g.M, g.M);
    std::vector<double> fixed;
    if (V.is_static()) fixed = V.at(t0).on_grid();
    for (long s = 0; s < n; ++s) {
        double tm = t0 + (double(s) + 0.5) * h;
        std::vector<double> v = V.is_static() ? fixed : V.at(tm).on_grid();
#pragma omp parallel for schedule(static)
        for (int c = 0; c < g.M; ++c) {
            CVector col = U.col(c);
            potential_phase(col, v, h, hbar);
            kinetic_step(col, mult, fft);
            potential_phase(col, v, h, hbar);
            U.col(c) = col;
        }
    }
    return U;
}

GridOperator HartreeEnsemble::density(const Grid& g) const {
    CMatrix R = CMatrix::Zero(g.M, g.M);
    for (size_t i = 0; i < states.size(); ++i) R += weights[i] * g.dx() * states[i] * states[i].adjoint();
    return {g, R, Role::density};
}

std::vector<double> HartreeEnsemble::position_density() const {
    std::vector<double> rho(states.front().size(), 0.0);
    for (size_t i = 0; i < states.size(); ++i)
        for (Eigen::Index j = 0; j < states[i].size(); ++j) rho[j] += weights[i] * std::norm(states[i](j));
    return rho;
}

std::vector<cplx> density_fourier(const Grid& g, const std::vector<double>& rho, int mmax) {
    std::vector<cplx> out(2 * mmax + 1, 0.0);
    for (int m = -mmax; m <= mmax; ++m) {
        cplx s = 0.0;
        for (int j = 0; j < g.M; ++j) {
            long r = ((long(m) * j) % g.M + g.M) % g.M;
            s += rho[j] * std::polar(1.0, -2.0 * kPi * double(r) / g.M);
        }
        out[m + mmax] = s * g.dx();
    }
    return out;
}

PotentialSeries meanfield_potential(const PotentialSeries& V, const std::vector<double>& rho) {
    const Grid& g = V.grid();
    auto rt = density_fourier(g, rho, V.mmax());
    PotentialSeries out(g, V.mmax());
    for (int m = -V.mmax(); m <= V.mmax(); ++m) out.set(m, V.hat(m) * rt[m + V.mmax()]);
    return out;
}

PotentialSeries meanfield_potential(const PotentialSeries& V, const GridOperator& R) {
    // rho(x_j) dx = R_jj
    std::vector<double> rho(R.grid.M);
    for (int j = 0; j < R.grid.M; ++j) rho[j] = R.mat(j, j).real() / R.grid.dx();
    return meanfield_potential(V, rho);
}

double hartree_energy(const Grid& g, const HartreeEnsemble& e, const PotentialSeries& V, double hbar) {
    CMatrix T = kinetic_matrix(g, hbar);
    double kin = 0.0;
    for (size_t i = 0; i < e.states.size(); ++i)
        kin += e.weights[i] * (e.states[i].adjoint() * T * e.states[i])(0, 0).real() * g.dx();
    auto rt = density_fourier(g, e.position_density(), V.mmax());
    double pot = 0.0;
    for (int m = -V.mmax(); m <= V.mmax(); ++m) pot += (V.hat(m) * std::norm(rt[m + V.mmax()])).real();
    return kin + 0.5 * pot;
}

std::size_t HartreeTrajectory::node_of(double t) const {
    double u = (t - times.front()) / dt;
    double r = std::round(u);
    if (std::abs(u - r) > 1e-6 || r < 0 || r >= double(times.size()))
        throw Error("HartreeTrajectory: time " + std::to_string(t) + " is not a recorded node");
    return std::size_t(r);
}

HartreeTrajectory hartree_evolve(const Grid& g, const HartreeEnsemble& in, const PotentialSeries& V, double T,
                                 double dt, double hbar) {
    V.require_even_real("hartree_evolve");
    if (in.states.empty() || in.states.size() != in.weights.size()) throw Error("hartree_evolve: empty ensemble");
    if (in.states.size() > 8) throw Error("hartree_evolve: ensembles are limited to rank 8");
    double wsum = 0.0;
    for (size_t i = 0; i < in.states.size(); ++i) {
        if (in.weights[i] < 0.0) throw Error("hartree_evolve: negative ensemble weight");
        wsum += in.weights[i];
        double nrm = in.states[i].squaredNorm() * g.dx();
        if (std::abs(nrm - 1.0) > 1e-10) throw Error("hartree_evolve: ensemble state is not normalized");
    }
    if (std::abs(wsum - 1.0) > 1e-10) throw Error("hartree_evolve: ensemble weights do not sum to 1");
    long n = step_count(0.0, T, dt);

    Fft1d fft(g.M);
    auto mult = kinetic_multiplier(g, hbar, dt);
    HartreeTrajectory tr;
    tr.grid = g;
    tr.hbar = hbar;
    tr.dt = dt;
    HartreeEnsemble cur = in;
    std::vector<PotentialSeries> vr;
    tr.times.push_back(0.0);
    tr.states.push_back(cur);
    vr.push_back(meanfield_potential(V, cur.position_density()));
    for (long s = 0; s < n; ++s) {
        std::vector<double> v = vr.back().on_grid();
        for (auto& psi : cur.states) {
            potential_phase(psi, v, dt, hbar);
            kinetic_step(psi, mult, fft);
        }
        PotentialSeries next = meanfield_potential(V, cur.position_density());
        v = next.on_grid();
        for (auto& psi : cur.states) potential_phase(psi, v, dt, hbar);
        // the potential step leaves |psi| unchanged, so `next` is also the node value
        tr.times.push_back(double(s + 1) * dt);
        tr.states.push_back(cur);
        vr.push_back(std::move(next));
    }
    tr.meanfield = (vr.size() == 1) ? PotentialTimeline(vr.front()) : PotentialTimeline(0.0, dt, std::move(vr));
    return tr;
}

NBodyState NBodyState::product(const Grid& g, int N, double hbar, const CVector& psi) {
    if (N < 1) throw Error("NBodyState: N must be >= 1");
    std::size_t size = kernels::tensor_size(g.M, N);
    if (size > kMaxAmplitudes) throw Error("NBodyState: " + std::to_string(size) + " amplitudes exceed the budget");
    NBodyState s;
    s.grid = g;
    s.N = N;
    s.hbar = hbar;
    s.amps.assign(size, 1.0);
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t r = i;
        cplx v = 1.0;
        for (int a = 0; a < N; ++a) {
            v *= psi(Eigen::Index(r % g.M));
            r /= g.M;
        }
        s.amps[i] = v;
    }
    return s;
}

double NBodyState::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s * std::pow(grid.dx(), N));
}

double NBodyState::swap_residual(int k, int l) const {
    const int M = grid.M;
    std::vector<int> dig(N);
    double worst = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        std::size_t r = i;
        for (int a = N - 1; a >= 0; --a) {
            dig[a] = int(r % M);
            r /= M;
        }
        std::swap(dig[k], dig[l]);
        std::size_t j = 0;
        for (int a = 0; a < N; ++a) j = j * M + dig[a];
        worst = std::max(worst, std::abs(amps[i] - amps[j]));
    }
    return worst;
}

double NBodyState::symmetry_residual() const {
    double w = 0.0;
    for (int k = 0; k + 1 < N; ++k) w = std::max(w, swap_residual(k, k + 1));
    return w;
}

CVector NBodyState::unit_vector() const {
    CVector v(amps.size());
    double s = std::pow(grid.dx(), 0.5 * N);
    for (std::size_t i = 0; i < amps.size(); ++i) v(Eigen::Index(i)) = amps[i] * s;
    return v;
}

NBodyState nbody_evolve(const NBodyState& psi, const PotentialSeries& V, double T, double dt) {
    V.require_even_real("nbody_evolve");
    const Grid& g = psi.grid;
    std::size_t size = kernels::tensor_size(g.M, psi.N);
    if (size > kMaxAmplitudes)
        throw Error("nbody_evolve: " + std::to_string(size) + " amplitudes (" + std::to_string(size * 16 >> 20) +
                    " MiB) exceed the budget of " + std::to_string(kMaxAmplitudes));
    long n = step_count(0.0, T, dt);
    NBodyState out = psi;
    if (n == 0) return out;
    std::vector<double> vdiff = V.on_grid();
    double half = -dt / (2.0 * psi.hbar * psi.N);
    Fft1d fft(g.M);
    auto mult = kinetic_multiplier(g, psi.hbar, dt);
    const int M = g.M, N = psi.N;
    kernels::parallel::pair_phase(out.amps, M, N, vdiff, half);
    for (long s = 0; s < n; ++s) {
        kernels::parallel::axis_multiplier(out.amps, M, N, mult, fft);
        kernels::parallel::pair_phase(out.amps, M, N, vdiff, s + 1 < n ? 2.0 * half : half);
    }
    return out;
}

CMatrix nbody_hamiltonian(const Grid& g, int N, const PotentialSeries& V, double hbar) {
    std::size_t dim = kernels::tensor_size(g.M, N);
    if (dim > std::size_t(kMaxDenseDim))
        throw Error("nbody_hamiltonian: dimension " + std::to_string(dim) + " exceeds the dense limit");
    const int M = g.M, D = int(dim);
    CMatrix T = kinetic_matrix(g, hbar);
    CMatrix H = CMatrix::Zero(D, D);
    int stride = D / M;
    for (int k = 0; k < N; ++k, stride /= M) {
        // slot k: rows differ only in digit k
        for (int i = 0; i < D; ++i) {
            int dk = (i / stride) % M;
            int base = i - dk * stride;
            for (int c = 0; c < M; ++c) H(i, base + c * stride) += T(dk, c);
        }
    }
    std::vector<double> v = V.on_grid();
    std::vector<int> dig(N);
    for (int i = 0; i < D; ++i) {
        int r = i;
        for (int a = N - 1; a >= 0; --a) {
            dig[a] = r % M;
            r /= M;
        }
        double s = 0.0;
        for (int k = 0; k < N; ++k)
            for (int l = k + 1; l < N; ++l) s += v[((dig[k] - dig[l]) % M + M) % M];
        H(i, i) += s / N;
    }
    return H;
}

NBodyPropagator::NBodyPropagator(const Grid& g, int N, const PotentialSeries& V, double hbar)
    : hbar_(hbar), H_(nbody_hamiltonian(g, N, V, hbar)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H_);
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
}

CMatrix NBodyPropagator::at(double t) const {
    CVector ph(vals_.size());
    for (Eigen::Index i = 0; i < vals_.size(); ++i) ph(i) = std::polar(1.0, t * vals_(i) / hbar_);
    return vecs_ * ph.asDiagonal() * vecs_.adjoint();
}

CMatrix nbody_propagator(const Grid& g, int N, const PotentialSeries& V, double t, double hbar) {
    return NBodyPropagator(g, N, V, hbar).at(t);
}

GridOperator marginal1(const NBodyState& psi) {
    double scale = std::pow(psi.grid.dx(), psi.N);
    return {psi.grid, kernels::parallel::contract(psi.amps, psi.grid.M, psi.N, 1, scale), Role::density};
}

CMatrix marginal2(const NBodyState& psi) {
    if (psi.N < 2) throw Error("marginal2: need N >= 2");
    double scale = std::pow(psi.grid.dx(), psi.N);
    return kernels::parallel::contract(psi.amps, psi.grid.M, psi.N, 2, scale);
}

CMatrix partial_trace(const CMatrix& F, int M, int N, int keep) {
    if (keep < 0 || keep > N) throw Error("partial_trace: bad slot count");
    Eigen::Index a = Eigen::Index(kernels::tensor_size(M, keep)), b = Eigen::Index(kernels::tensor_size(M, N - keep));
    if (F.rows() != a * b) throw Error("partial_trace: operator dimension does not match M^N");
    CMatrix out = CMatrix::Zero(a, a);
    for (Eigen::Index i = 0; i < a; ++i)
        for (Eigen::Index j = 0; j < a; ++j) {
            cplx s = 0.0;
            for (Eigen::Index r = 0; r < b; ++r) s += F(i * b + r, j * b + r);
            out(i, j) = s;
        }
    return out;
}

CMatrix marginal1(const CMatrix& F, int M, int N) { return partial_trace(F, M, N, 1); }
CMatrix marginal2(const CMatrix& F, int M, int N) {
    if (N < 2) throw Error("marginal2: need N >= 2");
    return partial_trace(F, M, N, 2);
}

}  // namespace mfl
