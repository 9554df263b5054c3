#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mfl/core.hpp"
#include "mfl/potential.hpp"
#include "mfl/qdyn.hpp"

namespace mfl {

// Test modes e^{i(alpha x + beta xi)} with alpha = w_m, beta = w_j for |m| <= alpha_max, |j| <= beta_max,
// each divided by max(1, |alpha|, |beta|)^order.
struct DualNormFamily {
    int order = 6;
    int alpha_max = 4;
    int beta_max = 4;
};

struct TestMode {
    double alpha;
    double beta;
    double weight;  // max(1, |alpha|, |beta|)^order
};

std::vector<TestMode> family_modes(const Grid& g, const DualNormFamily& f);

struct DualNormValue {
    double value = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

// max over the family of |tr(dK OP[e])| / weight: a lower bound for the dual Sobolev norm of W[dK]
DualNormValue dual_norm_estimate(const GridOperator& dK, double hbar, const DualNormFamily& f);

// Estimate restricted to |m|, |j| <= c for c = 0 .. max(alpha_max, beta_max); nondecreasing in c.
// The relative change of the last step shows whether the family has saturated.
std::vector<double> dual_norm_profile(const GridOperator& dK, double hbar, const DualNormFamily& f);

struct ConvergenceRecord {
    int N = 0;
    double hbar = 0.0;
    double t = 0.0;
    int M = 0;
    double dt = 0.0;
    double error = 0.0;
    double argmax_alpha = 0.0;
    double argmax_beta = 0.0;
    double wall_ms = 0.0;

    bool operator==(const ConvergenceRecord&) const = default;
};

struct InitialSpec {
    std::string kind = "gaussian";
    double width = 0.5;
    double center = kPi;
};

// periodized Gaussian exp(-d^2 / (2 width^2)), d the torus distance to the center; sum |psi|^2 dx = 1
CVector initial_state(const Grid& g, const InitialSpec& s);

struct ConvergeConfig {
    Grid grid;
    PotentialSeries V;
    InitialSpec initial;
    double T = 1.0;
    double dt = 0.0025;
    std::vector<int> Ns;
    std::vector<double> hbars;
    DualNormFamily family;
    std::uint64_t seed = 7;
    bool timing = false;  // wall_ms is 0 unless set, so reports stay byte-reproducible
    double uniformity_ceiling = 5.0;
};

// Per-record side output that does not belong in the CSV.
struct ConvergeExtra {
    std::vector<double> profile;  // dual_norm_profile of the same difference
    double trace_distance = 0.0;
};

struct ConvergeHooks {
    std::vector<ConvergeExtra>* extras = nullptr;
    std::function<void(const NBodyState&, const ConvergenceRecord&)> on_final;
};

// N-body marginal against Hartree at time T for every (N, hbar) cell, product initial data.
// Cells run one after another; the N-body kernels themselves are OpenMP-parallel.
std::vector<ConvergenceRecord> converge_run(const ConvergeConfig& c, const ConvergeHooks& hooks = {});

struct UniformityRowN {
    int N;
    int count;
    double max_error;
    double min_error;
    double ratio;
};

struct UniformitySummary {
    std::vector<UniformityRowN> rows;
    double ceiling = 5.0;
    bool degenerate = false;  // every error below 1e-12
    bool pass = false;
};

UniformitySummary uniformity_report(const std::vector<ConvergenceRecord>& records, double ceiling = 5.0,
                                    int min_span = 1);

struct LogLogFit {
    double slope;
    double intercept;
    double r2;
};

// least squares of log y on log x
LogLogFit loglog_slope(const std::vector<std::pair<double, double>>& points);

double trace_distance(const GridOperator& K1, const GridOperator& K2);

inline constexpr const char* kConvergeCsvHeader = "N,hbar,t,M,dt,error,argmax_alpha,argmax_beta,wall_ms";

std::string records_csv(const std::vector<ConvergenceRecord>& records);
std::vector<ConvergenceRecord> parse_records_csv(const std::string& text);
std::string sha256_hex(const std::string& data);

// format "csv" writes records_csv; "json" writes {config, records, hash} with hash = sha256 of the CSV text.
void emit_report(const std::vector<ConvergenceRecord>& records, const std::string& path, const std::string& format,
                 const std::string& config_json = "{}");

}  // namespace mfl
