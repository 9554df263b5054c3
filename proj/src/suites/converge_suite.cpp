#include <filesystem>

#include "mfl/suites.hpp"
#include "probes.hpp"

namespace mfl {

using namespace probes;

ConvergeConfig default_converge_config() {
    ConvergeConfig c;
    c.grid = make_grid(1, 16, 2 * kPi);
    c.V = PotentialSeries::cosine(c.grid, 1, 0.5);
    c.initial = {"gaussian", 0.5, kPi};
    c.T = 1.0;
    c.dt = 0.0025;
    c.Ns = {2, 3, 4, 5};
    c.hbars = {1.0, 0.5, 0.25};
    return c;
}

std::string default_converge_json() { return converge_config_to_json(default_converge_config()).dump(2) + "\n"; }

SuiteResult converge_suite(const ConvergeConfig& c, const std::string& checkpoint_dir) {
    Stopwatch clock;
    SuiteResult res;
    res.suite = "converge";
    std::vector<ConvergeExtra> extras;
    ConvergeHooks hooks;
    hooks.extras = &extras;
    if (!checkpoint_dir.empty()) {
        std::filesystem::create_directories(checkpoint_dir);
        hooks.on_final = [&](const NBodyState& st, const ConvergenceRecord& r) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "state_N%d_hbar%g", r.N, r.hbar);
            write_checkpoint((std::filesystem::path(checkpoint_dir) / stem).string(), {st, r.t, r.dt, c.V});
        };
    }
    auto recs = converge_run(c, hooks);

    Json slopes = Json::object();
    for (double h : c.hbars) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : recs)
            if (r.hbar == h) pts.push_back({double(r.N), r.error});
        std::string tag = "hbar=" + fmt(h);
        bool dec = true;
        for (std::size_t i = 1; i < pts.size(); ++i) dec = dec && pts[i].second < pts[i - 1].second;
        res.add(4, "error_strictly_decreasing_in_N_" + tag, dec ? 1.0 : 0.0, 1.0, dec);
        if (pts.size() >= 3) {
            LogLogFit f = loglog_slope(pts);
            slopes[tag] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
            res.add_max(4, "loglog_slope_" + tag, f.slope, -0.45, "r2 " + fmt(f.r2));
        }
    }

    int span = int(c.hbars.size());
    UniformitySummary u = uniformity_report(recs, c.uniformity_ceiling, std::min(span, 3));
    for (const auto& row : u.rows)
        res.add(5, "hbar_uniformity_ratio_N=" + std::to_string(row.N), row.ratio, u.ceiling, row.ratio < u.ceiling,
                u.degenerate ? "degenerate: all errors below 1e-12" : "");

    // diagnostics only: saturation of the test family and the trace-norm distance
    Json diag = Json::array();
    double worst_sat = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& p = extras[i].profile;
        double sat = p.size() >= 2 && p.back() > 0 ? (p.back() - p[p.size() - 2]) / p.back() : 0.0;
        worst_sat = std::max(worst_sat, sat);
        // bound shape: error * sqrt(N) should stay bounded
        diag.push_back({{"N", recs[i].N},
                        {"hbar", recs[i].hbar},
                        {"profile", p},
                        {"last_step_relative_change", sat},
                        {"trace_distance", extras[i].trace_distance},
                        {"error_times_sqrt_N", recs[i].error * std::sqrt(double(recs[i].N))}});
    }

    std::string csv = records_csv(recs);
    Json j;
    j["config"] = converge_config_to_json(c);
    j["hash"] = sha256_hex(csv);
    j["slopes"] = slopes;
    Json urows = Json::array();
    for (const auto& row : u.rows)
        urows.push_back({{"N", row.N}, {"max", row.max_error}, {"min", row.min_error}, {"ratio", row.ratio}});
    j["uniformity"] = {{"ceiling", u.ceiling}, {"degenerate", u.degenerate}, {"pass", u.pass}, {"rows", urows}};
    j["diagnostics"] = diag;
    j["max_saturation_change"] = worst_sat;
    Json checks = Json::array();
    for (const auto& ch : res.checks)
        checks.push_back({{"criterion", ch.criterion}, {"check", ch.name}, {"value", ch.value}, {"pass", ch.pass}});
    j["checks"] = checks;

    res.files["converge.csv"] = csv;
    res.files["converge.json"] = j.dump(2) + "\n";
    res.files["converge_checks.csv"] = checks_csv(res);
    double secs = clock.seconds();
    res.checks.push_back({4, "runtime_seconds", secs, 900.0, secs <= 900.0, {}, true});
    return res;
}

}  // namespace mfl
