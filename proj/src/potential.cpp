#include "mfl/potential.hpp"

#include <algorithm>
#include <cmath>

namespace mfl {

PotentialSeries::PotentialSeries(const Grid& g, int mmax) : grid_(g), mmax_(mmax), coef_(2 * mmax + 1, 0.0) {
    if (mmax < 0) throw Error("PotentialSeries: negative mode cutoff");
}

PotentialSeries::PotentialSeries(const Grid& g, const std::vector<cplx>& coeffs) : grid_(g) {
    if (coeffs.size() % 2 != 1) throw Error("PotentialSeries: need 2*mmax+1 coefficients");
    mmax_ = int(coeffs.size() / 2);
    coef_ = coeffs;
}

PotentialSeries PotentialSeries::cosine(const Grid& g, int m, double amp) {
    PotentialSeries v(g, std::abs(m));
    v.set(m, 0.5 * amp);
    v.set(-m, 0.5 * amp);
    if (m == 0) v.set(0, amp);
    return v;
}

void PotentialSeries::set(int m, cplx c) {
    if (std::abs(m) > mmax_) {
        std::vector<cplx> nc(2 * std::abs(m) + 1, 0.0);
        for (int k = -mmax_; k <= mmax_; ++k) nc[k + std::abs(m)] = coef_[k + mmax_];
        mmax_ = std::abs(m);
        coef_ = std::move(nc);
    }
    coef_[m + mmax_] = c;
}

cplx PotentialSeries::value(double x) const {
    cplx s = 0.0;
    for (int m = -mmax_; m <= mmax_; ++m) s += coef_[m + mmax_] * std::polar(1.0, grid_.omega(m) * x);
    return s;
}

cplx PotentialSeries::grad(double x) const {
    cplx s = 0.0;
    for (int m = -mmax_; m <= mmax_; ++m)
        s += kI * grid_.omega(m) * coef_[m + mmax_] * std::polar(1.0, grid_.omega(m) * x);
    return s;
}

cplx PotentialSeries::hess(double x) const {
    cplx s = 0.0;
    for (int m = -mmax_; m <= mmax_; ++m) {
        double w = grid_.omega(m);
        s -= w * w * coef_[m + mmax_] * std::polar(1.0, w * x);
    }
    return s;
}

std::vector<double> PotentialSeries::on_grid() const {
    std::vector<double> v(grid_.M, 0.0);
    for (int j = 0; j < grid_.M; ++j) {
        cplx s = 0.0;
        for (int m = -mmax_; m <= mmax_; ++m) {
            long r = ((long(m) * j) % grid_.M + grid_.M) % grid_.M;
            s += coef_[m + mmax_] * std::polar(1.0, 2.0 * kPi * double(r) / grid_.M);
        }
        v[j] = s.real();
    }
    return v;
}

bool PotentialSeries::is_real(double tol) const {
    for (int m = -mmax_; m <= mmax_; ++m)
        if (std::abs(hat(-m) - std::conj(hat(m))) > tol) return false;
    return true;
}

bool PotentialSeries::is_even(double tol) const {
    for (int m = -mmax_; m <= mmax_; ++m) {
        if (std::abs(hat(m).imag()) > tol) return false;
        if (std::abs(hat(-m) - hat(m)) > tol) return false;
    }
    return true;
}

void PotentialSeries::require_even_real(const char* who) const {
    if (!is_even()) throw Error(std::string(who) + ": potential must be even and real-valued");
}

double PotentialSeries::bold_v() const {
    double s = 0.0;
    for (int m = -mmax_; m <= mmax_; ++m)
        s += std::abs(hat(m)) * std::pow(1.0 + std::abs(grid_.omega(m)), grid_.d + 6);
    return s;
}

double PotentialSeries::gamma2() const {
    double s = 0.0;
    for (int m = -mmax_; m <= mmax_; ++m) s += std::abs(hat(m)) * grid_.omega(m) * grid_.omega(m);
    return s;
}

double PotentialSeries::total_variation() const {
    double s = 0.0;
    for (const auto& c : coef_) s += std::abs(c);
    return s;
}

PotentialSeries& PotentialSeries::axpy(double s, const PotentialSeries& o) {
    for (int m = -o.mmax_; m <= o.mmax_; ++m)
        if (o.hat(m) != cplx(0.0)) set(m, hat(m) + s * o.hat(m));
    return *this;
}

PotentialTimeline::PotentialTimeline(const PotentialSeries& fixed) : nodes_{fixed} {}

PotentialTimeline::PotentialTimeline(double t0, double step, std::vector<PotentialSeries> nodes)
    : t0_(t0), step_(step), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error("PotentialTimeline: no nodes");
    if (nodes_.size() > 1 && !(step > 0.0)) throw Error("PotentialTimeline: node spacing must be positive");
    for (const auto& n : nodes_)
        if (!(n.grid() == nodes_.front().grid())) throw Error("PotentialTimeline: nodes on different grids");
}

bool PotentialTimeline::covers(double a, double b) const {
    if (is_static()) return true;
    double lo = std::min(a, b), hi = std::max(a, b);
    double end = t0_ + step_ * double(nodes_.size() - 1);
    double eps = 1e-9 * std::max(1.0, std::abs(end));
    return lo >= t0_ - eps && hi <= end + eps;
}

void PotentialTimeline::require_cover(double a, double b, const char* who) const {
    if (!covers(a, b))
        throw Error(std::string(who) + ": potential timeline does not cover [" + std::to_string(std::min(a, b)) +
                    ", " + std::to_string(std::max(a, b)) + "]");
}

PotentialSeries PotentialTimeline::at(double t) const {
    if (is_static()) return nodes_.front();
    double u = (t - t0_) / step_;
    long last = long(nodes_.size()) - 1;
    long i = std::clamp(long(std::floor(u)), 0L, std::max(0L, last - 1));
    double f = std::clamp(u - double(i), 0.0, 1.0);
    if (i >= last) return nodes_.back();
    PotentialSeries r = nodes_[i];
    for (int m = -r.mmax(); m <= r.mmax(); ++m) r.set(m, r.hat(m) * (1.0 - f));
    r.axpy(f, nodes_[i + 1]);
    return r;
}

double PotentialTimeline::bold_w() const {
    int mm = 0;
    for (const auto& n : nodes_) mm = std::max(mm, n.mmax());
    const Grid& g = grid();
    double s = 0.0;
    for (int m = -mm; m <= mm; ++m) {
        double sup = 0.0;
        for (const auto& n : nodes_) sup = std::max(sup, std::abs(n.hat(m)));
        s += sup * std::pow(1.0 + std::abs(g.omega(m)), g.d + 6);
    }
    return s;
}

double PotentialTimeline::gamma2() const {
    double s = 0.0;
    for (const auto& n : nodes_) s = std::max(s, n.gamma2());
    return s;
}

}  // namespace mfl
