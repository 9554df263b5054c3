#pragma once

#include <vector>

#include "mfl/core.hpp"

namespace mfl {

// V(x) = sum_{|m| <= mmax} hat(m) e^{i w_m x},  w_m = 2 pi m / L.
class PotentialSeries {
public:
    PotentialSeries() = default;
    PotentialSeries(const Grid& g, int mmax);
    // coefficients listed for m = -mmax .. mmax
    PotentialSeries(const Grid& g, const std::vector<cplx>& coeffs);

    static PotentialSeries zero(const Grid& g) { return PotentialSeries(g, 0); }
    // amp * cos(w_m x)
    static PotentialSeries cosine(const Grid& g, int m, double amp);

    const Grid& grid() const { return grid_; }
    int mmax() const { return mmax_; }
    cplx hat(int m) const { return std::abs(m) > mmax_ ? cplx(0.0) : coef_[m + mmax_]; }
    void set(int m, cplx c);
    const std::vector<cplx>& coeffs() const { return coef_; }

    cplx value(double x) const;
    cplx grad(double x) const;
    cplx hess(double x) const;
    std::vector<double> on_grid() const;  // real part at the nodes

    bool is_real(double tol = 1e-14) const;
    bool is_even(double tol = 1e-14) const;  // real coefficients with hat(-m) = hat(m)
    void require_even_real(const char* who) const;

    // sum |hat| (1 + |w|)^{d+6}
    double bold_v() const;
    // sum |hat| w^2, an upper bound for |V''|
    double gamma2() const;
    double total_variation() const;  // sum |hat|

    PotentialSeries& axpy(double s, const PotentialSeries& o);

private:
    Grid grid_;
    int mmax_ = 0;
    std::vector<cplx> coef_;
};

// Piecewise-linear (in coefficients) time dependence over uniform nodes.
// A timeline with one node is constant for all times.
class PotentialTimeline {
public:
    PotentialTimeline() = default;
    explicit PotentialTimeline(const PotentialSeries& fixed);
    PotentialTimeline(double t0, double step, std::vector<PotentialSeries> nodes);

    PotentialSeries at(double t) const;
    bool covers(double a, double b) const;
    void require_cover(double a, double b, const char* who) const;
    bool is_static() const { return nodes_.size() == 1; }

    const Grid& grid() const { return nodes_.front().grid(); }
    double t0() const { return t0_; }
    double step() const { return step_; }
    const std::vector<PotentialSeries>& nodes() const { return nodes_; }

    // sum_m sup_t |hat_m(t)| (1 + |w_m|)^{d+6}   (sup over nodes is exact for linear interpolation)
    double bold_w() const;
    double gamma2() const;

private:
    double t0_ = 0.0, step_ = 0.0;
    std::vector<PotentialSeries> nodes_;
};

}  // namespace mfl
