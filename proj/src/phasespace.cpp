#include "mfl/phasespace.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/fft.hpp"

namespace mfl {

namespace {

bool same_key(const std::vector<double>& a, const std::vector<double>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

void require_1d(const Grid& g, const char* who) {
    if (g.d != 1) throw Error(std::string(who) + ": only d = 1 is implemented");
}

double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

FourierSymbol FourierSymbol::constant(const Grid& g, cplx c) {
    FourierSymbol s(g);
    s.add(std::vector<double>(g.d, 0.0), std::vector<double>(g.d, 0.0), c);
    return s;
}

FourierSymbol FourierSymbol::mode(const Grid& g, double alpha, double beta, cplx c) {
    FourierSymbol s(g);
    s.add(alpha, beta, c);
    return s;
}

FourierSymbol& FourierSymbol::add(const std::vector<double>& alpha, const std::vector<double>& beta,
                                  cplx c) {
    if (int(alpha.size()) != grid_.d || int(beta.size()) != grid_.d)
        throw Error("symbol term dimension does not match the grid");
    for (double a : alpha) lattice_index(grid_, a);
    for (auto& t : terms_)
        if (same_key(t.alpha, alpha) && same_key(t.beta, beta)) {
            t.c += c;
            return *this;
        }
    terms_.push_back({alpha, beta, c});
    return *this;
}

FourierSymbol& FourierSymbol::add(const FourierSymbol& o, cplx scale) {
    if (!(o.grid_ == grid_)) throw Error("symbols live on different grids");
    for (const auto& t : o.terms_) add(t.alpha, t.beta, scale * t.c);
    return *this;
}

cplx FourierSymbol::eval(const std::vector<double>& x, const std::vector<double>& xi) const {
    cplx s = 0.0;
    for (const auto& t : terms_) {
        double ph = 0.0;
        for (int i = 0; i < grid_.d; ++i) ph += t.alpha[i] * x[i] + t.beta[i] * xi[i];
        s += t.c * std::polar(1.0, ph);
    }
    return s;
}

FourierSymbol FourierSymbol::conj() const {
    FourierSymbol r(grid_);
    for (const auto& t : terms_) {
        std::vector<double> a = t.alpha, b = t.beta;
        for (auto& v : a) v = -v;
        for (auto& v : b) v = -v;
        r.add(a, b, std::conj(t.c));
    }
    return r;
}

bool FourierSymbol::is_real(double tol) const {
    FourierSymbol diff = *this - conj();
    for (const auto& t : diff.terms_)
        if (std::abs(t.c) > tol) return false;
    return true;
}

FourierSymbol FourierSymbol::shifted_xi(double shift) const {
    require_1d(grid_, "shifted_xi");
    FourierSymbol r(grid_);
    for (const auto& t : terms_) r.add(t.alpha, t.beta, t.c * std::polar(1.0, t.beta[0] * shift));
    return r;
}

double FourierSymbol::l1() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.c);
    return s;
}

FourierSymbol operator+(const FourierSymbol& a, const FourierSymbol& b) {
    FourierSymbol r = a;
    r.add(b);
    return r;
}

FourierSymbol operator-(const FourierSymbol& a, const FourierSymbol& b) {
    FourierSymbol r = a;
    r.add(b, -1.0);
    return r;
}

FourierSymbol operator*(cplx s, const FourierSymbol& a) {
    FourierSymbol r(a.grid());
    r.add(a, s);
    return r;
}

cplx symbol_eval(const FourierSymbol& a, const std::vector<double>& x, const std::vector<double>& xi) {
    return a.eval(x, xi);
}

namespace {

// Fourier-basis matrix -> position basis
CMatrix to_position(const Grid& g, const CMatrix& QF) {
    CMatrix F = dft_matrix(g.M);
    return F.adjoint() * QF * F;
}

}  // namespace

GridOperator quantize_profile(const Grid& g, double hbar, const std::vector<int>& modes,
                              const ModeProfile& prof) {
    require_1d(g, "quantize");
    const int M = g.M;
    CMatrix Q = CMatrix::Zero(M, M);
    for (int m : modes) {
        double w = g.omega(m);
        for (int j = 0; j < M; ++j) {
            int k = g.wavenumber(j);
            int jp = g.index_of(k + m);
            double xik = g.freq(j), xikp = g.freq(jp);
            Q(jp, j) += 0.5 * (prof(m, hbar * (xik + 0.5 * w)) + prof(m, hbar * (xikp - 0.5 * w)));
        }
    }
    return {g, to_position(g, Q), Role::generic};
}

GridOperator quantize(const Grid& g, PlanckScale hbar, const FourierSymbol& a) {
    require_1d(g, "quantize");
    if (!(a.grid() == g)) throw Error("quantize: symbol grid differs from target grid");
    const int M = g.M;
    const double h = hbar.hbar;
    CMatrix Q = CMatrix::Zero(M, M);
    for (const auto& t : a.terms()) {
        int m = lattice_index(g, t.alpha[0]);
        double w = g.omega(m), b = t.beta[0];
        for (int j = 0; j < M; ++j) {
            int jp = g.index_of(g.wavenumber(j) + m);
            double xik = g.freq(j), xikp = g.freq(jp);
            Q(jp, j) += 0.5 * t.c *
                        (std::polar(1.0, h * b * (xik + 0.5 * w)) + std::polar(1.0, h * b * (xikp - 0.5 * w)));
        }
    }
    return {g, to_position(g, Q), Role::generic};
}

GridOperator quantize_callable(const Grid& g, double hbar,
                               const std::function<cplx(double x, double xi)>& a, int oversample) {
    require_1d(g, "quantize_callable");
    if (oversample < 1) throw Error("quantize_callable: oversample must be >= 1");
    const int M = g.M, P = M * oversample;
    const int nlo = -3 * M / 2, nhi = 3 * M / 2, nn = nhi - nlo + 1;
    // table(n, m) = x-Fourier coefficient of a(., eta_n) for m in [-M/2, M/2]
    Eigen::MatrixXcd table(nn, M + 1);
    Fft1d fft(P);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < nn; ++r) {
        double eta = hbar * kPi * (nlo + r) / g.L;
        std::vector<cplx> buf(P);
        for (int p = 0; p < P; ++p) buf[p] = a(p * g.L / P, eta);
        fft.forward(buf.data());
        for (int m = -M / 2; m <= M / 2; ++m) table(r, m + M / 2) = buf[((m % P) + P) % P] / double(P);
    }
    CMatrix Q = CMatrix::Zero(M, M);
    for (int m = -M / 2; m <= M / 2; ++m)
        for (int j = 0; j < M; ++j) {
            int k = g.wavenumber(j);
            int jp = g.index_of(k + m);
            int kp = g.wavenumber(jp);
            Q(jp, j) += 0.5 * (table(2 * k + m - nlo, m + M / 2) + table(2 * kp - m - nlo, m + M / 2));
        }
    return {g, to_position(g, Q), Role::generic};
}

GridOperator mod_op(const Grid& g, double omega) {
    require_1d(g, "mod_op");
    int m = lattice_index(g, omega);
    CMatrix E = CMatrix::Zero(g.M, g.M);
    for (int j = 0; j < g.M; ++j) E(j, j) = std::polar(1.0, 2.0 * kPi * double((long(m) * j) % g.M) / g.M);
    return {g, E, Role::unitary};
}

FourierSymbol moyal(const FourierSymbol& a, const FourierSymbol& b, double hbar) {
    if (!(a.grid() == b.grid())) throw Error("moyal: symbols live on different grids");
    const int d = a.grid().d;
    FourierSymbol r(a.grid());
    for (const auto& s : a.terms())
        for (const auto& t : b.terms()) {
            std::vector<double> al(d), be(d);
            double cross = 0.0;
            for (int i = 0; i < d; ++i) {
                al[i] = s.alpha[i] + t.alpha[i];
                be[i] = s.beta[i] + t.beta[i];
                cross += s.alpha[i] * t.beta[i] - s.beta[i] * t.alpha[i];
            }
            r.add(al, be, s.c * t.c * std::polar(1.0, 0.5 * hbar * kMoyalSign * cross));
        }
    return r;
}

cplx wigner_pair(const GridOperator& K, const FourierSymbol& a, double hbar) {
    if (!(K.grid == a.grid())) throw Error("wigner_pair: operator and symbol grids differ");
    GridOperator Q = quantize(K.grid, PlanckScale(hbar), a);
    return (K.mat * Q.mat).trace();
}

WignerField wigner_field(const GridOperator& K, double hbar, int resolution) {
    const Grid& g = K.grid;
    require_1d(g, "wigner_field");
    if (resolution < 1) throw Error("wigner_field: resolution must be >= 1");
    const int M = g.M, P = M * resolution;
    const int nlo = -3 * M / 2, nn = 3 * M + 1;
    CMatrix F = dft_matrix(M);
    CMatrix KF = F * K.mat * F.adjoint();

    // C(m, n): characteristic function chi(alpha_m, beta) = sum_n C(m, n) e^{i beta eta_n}
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M + 1, nn);
    for (int m = -M / 2; m <= M / 2; ++m) {
        double wt = (std::abs(m) == M / 2) ? 0.5 : 1.0;
        for (int j = 0; j < M; ++j) {
            int k = g.wavenumber(j);
            int jp = g.index_of(k + m);
            int kp = g.wavenumber(jp);
            cplx v = 0.5 * wt * KF(j, jp);
            C(m + M / 2, 2 * k + m - nlo) += v;
            C(m + M / 2, 2 * kp - m - nlo) += v;
        }
    }

    WignerField w;
    w.grid = g;
    w.hbar = hbar;
    const double weta = hbar * 2.0 * kPi / g.L;
    w.cell = (g.L / P) * weta;
    w.x.resize(P);
    w.eta.resize(nn);
    for (int p = 0; p < P; ++p) w.x[p] = p * g.L / P;
    for (int r = 0; r < nn; ++r) w.eta[r] = hbar * kPi * (nlo + r) / g.L;
    Eigen::MatrixXcd phase(P, M + 1);
    for (int p = 0; p < P; ++p)
        for (int m = -M / 2; m <= M / 2; ++m)
            phase(p, m + M / 2) = std::polar(1.0 / (g.L * weta), -2.0 * kPi * double((long(m) * p) % P) / P);
    w.values = phase * C;
    return w;
}

cplx WignerField::integrate(const FourierSymbol& a) const {
    cplx s = 0.0;
    for (const auto& t : a.terms()) {
        Eigen::VectorXcd ex(x.size()), ee(eta.size());
        for (size_t p = 0; p < x.size(); ++p) ex(p) = std::polar(1.0, t.alpha[0] * x[p]);
        for (size_t n = 0; n < eta.size(); ++n) ee(n) = std::polar(1.0, t.beta[0] * eta[n]);
        s += t.c * (ex.transpose() * values * ee)(0, 0);
    }
    return s * cell;
}

double WignerField::total() const { return values.sum().real() * cell; }

cplx field_inner(const WignerField& w1, const WignerField& w2) {
    if (w1.values.rows() != w2.values.rows() || w1.values.cols() != w2.values.cols())
        throw Error("field_inner: fields sampled on different lattices");
    return (w1.values.conjugate().cwiseProduct(w2.values)).sum() * w1.cell;
}

double cv_seminorm(const FourierSymbol& a, int d) {
    const int k = 2 * (d / 2 + 1);
    double s = 0.0;
    for (const auto& t : a.terms())
        s += std::abs(t.c) * std::pow(std::max({1.0, linf(t.alpha), linf(t.beta)}), k);
    return s;
}

double symbol_ball_norm(const FourierSymbol& a, int n) {
    if (n < 0) throw Error("symbol_ball_norm: order must be >= 0");
    double s = 0.0;
    for (const auto& t : a.terms())
        s += std::abs(t.c) * std::pow(std::max({1.0, linf(t.alpha), linf(t.beta)}), n);
    return s;
}

ProfileSymbol kinetic_bracket(const Grid& g, const FourierSymbol& a) {
    require_1d(g, "kinetic_bracket");
    ProfileSymbol ps;
    std::vector<SymbolTerm> terms = a.terms();
    for (const auto& t : terms) {
        int m = lattice_index(g, t.alpha[0]);
        if (std::find(ps.modes.begin(), ps.modes.end(), m) == ps.modes.end()) ps.modes.push_back(m);
    }
    Grid gg = g;
    ps.prof = [terms, gg](int m, double eta) {
        cplx s = 0.0;
        for (const auto& t : terms)
            if (lattice_index(gg, t.alpha[0]) == m)
                s += kI * t.alpha[0] * eta * t.c * std::polar(1.0, t.beta[0] * eta);
        return s;
    };
    return ps;
}

}  // namespace mfl
