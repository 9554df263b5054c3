#include "mfl/cdyn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfl {

void ParticleEnsemble::wrap(double L) {
    for (auto& v : x) {
        v = std::fmod(v, L);
        if (v < 0.0) v += L;
        if (v >= L) v = 0.0;
    }
}

std::size_t ClassicalTrajectory::node_of(double t) const {
    double u = (t - times.front()) / dt;
    double r = std::round(u);
    if (std::abs(u - r) > 1e-6 || r < 0 || r >= double(times.size()))
        throw Error("ClassicalTrajectory: time " + std::to_string(t) + " is not a node");
    return std::size_t(r);
}

std::vector<double> pair_forces(const ParticleEnsemble& z, const PotentialSeries& V) {
    const int N = z.size();
    std::vector<double> f(N, 0.0);
    for (int k = 0; k < N; ++k)
        for (int l = k + 1; l < N; ++l) {
            double g = V.grad(z.x[k] - z.x[l]).real();
            f[k] -= g;
            f[l] += g;  // V' is odd
        }
    for (auto& v : f) v /= N;
    return f;
}

double newton_energy(const ParticleEnsemble& z, const PotentialSeries& V) {
    const int N = z.size();
    double kin = 0.0, pot = 0.0;
    for (int k = 0; k < N; ++k) kin += 0.5 * z.xi[k] * z.xi[k];
    for (int k = 0; k < N; ++k)
        for (int l = k + 1; l < N; ++l) pot += 2.0 * V.value(z.x[k] - z.x[l]).real();
    return kin + pot / (2.0 * N);
}

ClassicalTrajectory newton_flow(const ParticleEnsemble& z, const PotentialSeries& V, double T, double dt) {
    V.require_even_real("newton_flow");
    if (!(dt > 0.0)) throw Error("newton_flow: dt must be positive");
    long n = std::lround(T / dt);
    if (std::abs(n * dt - T) > 1e-9 * std::max(1.0, T)) throw Error("newton_flow: dt does not divide T");
    const double L = V.grid().L;
    ClassicalTrajectory tr;
    tr.potential = V;
    tr.dt = dt;
    ParticleEnsemble cur = z;
    cur.wrap(L);
    tr.times.push_back(0.0);
    tr.frames.push_back(cur);
    std::vector<double> f = pair_forces(cur, V);
    for (long s = 0; s < n; ++s) {
        for (int k = 0; k < cur.size(); ++k) {
            cur.xi[k] += 0.5 * dt * f[k];
            cur.x[k] += dt * cur.xi[k];
        }
        cur.wrap(L);
        f = pair_forces(cur, V);
        for (int k = 0; k < cur.size(); ++k) cur.xi[k] += 0.5 * dt * f[k];
        tr.times.push_back(double(s + 1) * dt);
        tr.frames.push_back(cur);
    }
    return tr;
}

cplx empirical_pair(const ParticleEnsemble& z, const FourierSymbol& phi) {
    if (z.size() == 0) throw Error("empirical_pair: empty ensemble");
    cplx s = 0.0;
    for (int k = 0; k < z.size(); ++k) s += phi.eval(z.x[k], z.xi[k]);
    return s / double(z.size());
}

double vlasov_residual(const ClassicalTrajectory& traj, const FourierSymbol& phi, double t, double delta) {
    double ratio = delta / traj.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 || ratio < 0.5)
        throw Error("vlasov_residual: delta must be a positive multiple of dt");
    std::size_t i = traj.node_of(t);
    std::size_t k = std::size_t(std::lround(ratio));
    if (i < k || i + k >= traj.frames.size()) throw Error("vlasov_residual: t too close to the trajectory ends");
    cplx ddt = (empirical_pair(traj.frames[i + k], phi) - empirical_pair(traj.frames[i - k], phi)) / (2.0 * delta);

    const ParticleEnsemble& z = traj.frames[i];
    const int N = z.size();
    cplx rhs = 0.0;
    for (int a = 0; a < N; ++a) {
        double F = 0.0;  // (V' * rho_t)(x_a)
        for (int b = 0; b < N; ++b) F += traj.potential.grad(z.x[a] - z.x[b]).real();
        F /= N;
        cplx phx = 0.0, phxi = 0.0;
        for (const auto& term : phi.terms()) {
            cplx e = term.c * std::polar(1.0, term.alpha[0] * z.x[a] + term.beta[0] * z.xi[a]);
            phx += kI * term.alpha[0] * e;
            phxi += kI * term.beta[0] * e;
        }
        rhs += z.xi[a] * phx - F * phxi;
    }
    rhs /= double(N);
    return std::abs(ddt - rhs);
}

namespace {

struct Deriv {
    double dx, dxi;
};

// nonzero modes of a potential segment that is linear in time between two series
struct ForceMode {
    double w;
    cplx ha, hb;
};

std::vector<ForceMode> force_modes(const PotentialSeries& pa, const PotentialSeries& pb) {
    std::vector<ForceMode> f;
    int mm = std::max(pa.mmax(), pb.mmax());
    for (int m = -mm; m <= mm; ++m) {
        cplx a = pa.hat(m), b = pb.hat(m);
        if (m != 0 && (a != cplx(0.0) || b != cplx(0.0))) f.push_back({pa.grid().omega(m), a, b});
    }
    return f;
}

inline Deriv field(const std::vector<ForceMode>& modes, double wa, double x, double xi) {
    // dV/dx = Re sum i w c e^{iwx}
    double g = 0.0;
    for (const auto& m : modes) {
        cplx c = wa * m.ha + (1.0 - wa) * m.hb;
        double sn = std::sin(m.w * x), cs = std::cos(m.w * x);
        g -= m.w * (c.real() * sn + c.imag() * cs);
    }
    return {xi, -g};
}

// RK4 over [ta, tb] where the potential is linear in time between its values at ta and tb
PhasePoint rk4_segment(const std::vector<ForceMode>& modes, double ta, double tb, PhasePoint p, int steps) {
    double h = (tb - ta) / steps;
    auto w = [&](double tt) { return (tb == ta) ? 1.0 : (tb - tt) / (tb - ta); };
    for (int s = 0; s < steps; ++s) {
        double t = ta + s * h;
        Deriv k1 = field(modes, w(t), p.x, p.xi);
        Deriv k2 = field(modes, w(t + h / 2), p.x + h / 2 * k1.dx, p.xi + h / 2 * k1.dxi);
        Deriv k3 = field(modes, w(t + h / 2), p.x + h / 2 * k2.dx, p.xi + h / 2 * k2.dxi);
        Deriv k4 = field(modes, w(t + h), p.x + h * k3.dx, p.xi + h * k3.dxi);
        p.x += h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
        p.xi += h / 6 * (k1.dxi + 2 * k2.dxi + 2 * k3.dxi + k4.dxi);
    }
    return p;
}

struct Segment {
    double ta, tb;
    std::vector<ForceMode> modes;
};

std::vector<Segment> segments(const PotentialTimeline& V, double t, double s) {
    if (V.is_static()) {
        const PotentialSeries& v = V.nodes().front();
        return {{s, t, force_modes(v, v)}};
    }
    // breakpoints at the timeline nodes strictly between s and t
    double t0 = V.t0(), h = V.step();
    std::vector<double> cuts{s};
    double lo = std::min(s, t), hi = std::max(s, t);
    long first = long(std::floor((lo - t0) / h)) + 1, last = long(std::ceil((hi - t0) / h)) - 1;
    std::vector<double> inner;
    for (long i = first; i <= last; ++i) {
        double c = t0 + i * h;
        if (c > lo + 1e-12 && c < hi - 1e-12) inner.push_back(c);
    }
    if (t < s) std::reverse(inner.begin(), inner.end());
    for (double c : inner) cuts.push_back(c);
    cuts.push_back(t);
    std::vector<Segment> out;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        out.push_back({cuts[i], cuts[i + 1], force_modes(V.at(cuts[i]), V.at(cuts[i + 1]))});
    return out;
}

PhasePoint integrate(const std::vector<Segment>& segs, PhasePoint p, double max_step) {
    for (const auto& sg : segs) {
        int n = std::max(1, int(std::ceil(std::abs(sg.tb - sg.ta) / max_step)));
        p = rk4_segment(sg.modes, sg.ta, sg.tb, p, n);
    }
    return p;
}

}  // namespace

PhasePoint characteristics(const PotentialTimeline& V, double t, double s, PhasePoint p, double tol) {
    V.require_cover(s, t, "characteristics");
    if (t == s) return p;
    std::vector<Segment> segs = segments(V, t, s);
    double wmax = 0.0;
    for (const auto& sg : segs)
        for (const auto& m : sg.modes) wmax = std::max(wmax, std::abs(m.w));
    // first guess resolves the phase of the force seen by a particle of momentum xi
    double step = 0.05 / (1.0 + 0.25 * wmax * std::abs(p.xi));
    PhasePoint a = integrate(segs, p, step);
    for (int it = 0; it < 20; ++it) {
        step /= 2;
        PhasePoint b = integrate(segs, p, step);
        // RK4 step doubling: the finer answer is off by about |b - a| / 15
        double err = std::max(std::abs(a.x - b.x), std::abs(a.xi - b.xi)) / 15.0;
        if (err < tol) return b;
        a = b;
    }
    throw Error("characteristics: step doubling did not reach the tolerance");
}

double flow_derivative_probe(const PotentialTimeline& V, double t, double s, std::array<int, 2> nu, PhasePoint p) {
    int ord = nu[0] + nu[1];
    if (nu[0] < 0 || nu[1] < 0 || ord > 3) throw Error("flow_derivative_probe: need |nu| <= 3");
    if (ord == 0) {
        PhasePoint q = characteristics(V, t, s, p, 1e-12);
        return std::max(std::abs(q.x), std::abs(q.xi));
    }
    const double h = ord == 1 ? 1e-4 : (ord == 2 ? 2e-3 : 1e-2);
    // 1D central-difference weights for derivative order 0..3
    auto stencil = [](int k) -> std::vector<std::pair<int, double>> {
        switch (k) {
            case 0: return {{0, 1.0}};
            case 1: return {{-1, -0.5}, {1, 0.5}};
            case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
            default: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
        }
    };
    double dxs = 0.0, dxis = 0.0;
    for (auto [i, wi] : stencil(nu[0]))
        for (auto [j, wj] : stencil(nu[1])) {
            PhasePoint q = characteristics(V, t, s, {p.x + i * h, p.xi + j * h}, 1e-13);
            dxs += wi * wj * q.x;
            dxis += wi * wj * q.xi;
        }
    double scale = std::pow(h, ord);
    return std::max(std::abs(dxs), std::abs(dxis)) / scale;
}

double ProductDensity::x_density(double x) const {
    double s = 1.0;
    for (auto [m, a] : cos_modes) s += a * std::cos(grid.omega(m) * x);
    return s / grid.L;
}

void ProductDensity::validate() const {
    double s = 0.0;
    for (auto [m, a] : cos_modes) {
        if (m == 0) throw Error("ProductDensity: the constant mode is implicit");
        s += std::abs(a);
    }
    if (s >= 1.0) throw Error("ProductDensity: cosine amplitudes must sum to < 1 for positivity");
    if (!(xi_sigma > 0.0)) throw Error("ProductDensity: xi_sigma must be positive");
}

std::vector<ParticleEnsemble> sample_product(const ProductDensity& f1, int N, int count, std::uint64_t seed) {
    f1.validate();
    if (N < 1 || count < 0) throw Error("sample_product: bad sizes");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, f1.grid.L), uy(0.0, 1.0);
    std::normal_distribution<double> nxi(f1.xi_mean, f1.xi_sigma);
    double env = 1.0;
    for (auto [m, a] : f1.cos_modes) env += std::abs(a);
    std::vector<ParticleEnsemble> out(count);
    for (auto& z : out) {
        z.x.resize(N);
        z.xi.resize(N);
        for (int k = 0; k < N; ++k) {
            double x;
            do {
                x = ux(rng);
            } while (uy(rng) * env / f1.grid.L > f1.x_density(x));
            z.x[k] = x;
            z.xi[k] = nxi(rng);
        }
    }
    return out;
}

}  // namespace mfl
