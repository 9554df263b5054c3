#include "mfl/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "mfl/phasespace.hpp"
#include "mfl/qdyn.hpp"

namespace mfl {

std::vector<TestMode> family_modes(const Grid& g, const DualNormFamily& f) {
    if (f.alpha_max < 0 || f.beta_max < 0 || f.order < 0) throw Error("DualNormFamily: negative cutoff or order");
    std::vector<TestMode> out;
    for (int m = -f.alpha_max; m <= f.alpha_max; ++m)
        for (int j = -f.beta_max; j <= f.beta_max; ++j) {
            double a = g.omega(m), b = g.omega(j);
            out.push_back({a, b, std::pow(std::max({1.0, std::abs(a), std::abs(b)}), f.order)});
        }
    return out;
}

DualNormValue dual_norm_estimate(const GridOperator& dK, double hbar, const DualNormFamily& f) {
    const Grid& g = dK.grid;
    auto modes = family_modes(g, f);
    if (modes.empty()) throw Error("dual_norm_estimate: empty family");
    DualNormValue best;
    for (const auto& t : modes) {
        double v = std::abs(wigner_pair(dK, FourierSymbol::mode(g, t.alpha, t.beta, 1.0), hbar)) / t.weight;
        if (v > best.value) best = {v, t.alpha, t.beta};
    }
    return best;
}

std::vector<double> dual_norm_profile(const GridOperator& dK, double hbar, const DualNormFamily& f) {
    const Grid& g = dK.grid;
    int cmax = std::max(f.alpha_max, f.beta_max);
    std::vector<double> out(cmax + 1, 0.0);
    for (int m = -f.alpha_max; m <= f.alpha_max; ++m)
        for (int j = -f.beta_max; j <= f.beta_max; ++j) {
            double a = g.omega(m), b = g.omega(j);
            double w = std::pow(std::max({1.0, std::abs(a), std::abs(b)}), f.order);
            double v = std::abs(wigner_pair(dK, FourierSymbol::mode(g, a, b, 1.0), hbar)) / w;
            for (int c = std::max(std::abs(m), std::abs(j)); c <= cmax; ++c) out[c] = std::max(out[c], v);
        }
    return out;
}

CVector initial_state(const Grid& g, const InitialSpec& s) {
    if (s.kind != "gaussian") throw Error("initial state: unknown kind '" + s.kind + "'");
    if (!(s.width > 0.0)) throw Error("initial state: width must be positive");
    CVector psi(g.M);
    for (int j = 0; j < g.M; ++j) {
        double d = std::remainder(g.node(j) - s.center, g.L);
        psi(j) = std::exp(-d * d / (2.0 * s.width * s.width));
    }
    return psi / std::sqrt(psi.squaredNorm() * g.dx());
}

std::vector<ConvergenceRecord> converge_run(const ConvergeConfig& c, const ConvergeHooks& hooks) {
    if (c.Ns.empty() || c.hbars.empty()) throw Error("converge_run: empty scan");
    if (!(c.T >= 0.0)) throw Error("converge_run: T must be non-negative");
    for (int N : c.Ns) {
        if (N < 1) throw Error("converge_run: N must be >= 1");
        std::size_t amps = 1;
        for (int k = 0; k < N && amps <= kMaxAmplitudes; ++k) amps *= std::size_t(c.grid.M);
        if (amps > kMaxAmplitudes)
            throw Error("converge_run: N = " + std::to_string(N) + " at M = " + std::to_string(c.grid.M) +
                        " exceeds the memory guard of " + std::to_string(kMaxAmplitudes) + " amplitudes");
    }
    c.V.require_even_real("converge_run");
    CVector psi = initial_state(c.grid, c.initial);
    std::vector<ConvergenceRecord> out;
    for (double h : c.hbars) {
        GridOperator R = c.T > 0.0 ? hartree_evolve(c.grid, HartreeEnsemble::pure(psi), c.V, c.T, c.dt, h).states.back()
                                         .density(c.grid)
                                   : HartreeEnsemble::pure(psi).density(c.grid);
        for (int N : c.Ns) {
            auto t0 = std::chrono::steady_clock::now();
            NBodyState st = NBodyState::product(c.grid, N, h, psi);
            if (c.T > 0.0) st = nbody_evolve(st, c.V, c.T, c.dt);
            GridOperator F1 = marginal1(st);
            GridOperator dK{c.grid, F1.mat - R.mat, Role::generic};
            DualNormValue e = dual_norm_estimate(dK, h, c.family);
            double ms = 0.0;
            if (c.timing)
                ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out.push_back({N, h, c.T, c.grid.M, c.dt, e.value, e.alpha, e.beta, ms});
            if (hooks.extras) hooks.extras->push_back({dual_norm_profile(dK, h, c.family), trace_distance(F1, R)});
            if (hooks.on_final) hooks.on_final(st, out.back());
        }
    }
    return out;
}

UniformitySummary uniformity_report(const std::vector<ConvergenceRecord>& records, double ceiling, int min_span) {
    UniformitySummary s;
    s.ceiling = ceiling;
    std::map<int, std::vector<const ConvergenceRecord*>> byN;
    for (const auto& r : records) byN[r.N].push_back(&r);
    double overall = 0.0;
    for (auto& [N, rs] : byN) {
        std::vector<double> hs;
        for (auto* r : rs) hs.push_back(r->hbar);
        std::sort(hs.begin(), hs.end());
        int span = int(std::unique(hs.begin(), hs.end()) - hs.begin());
        if (span < min_span)
            throw Error("uniformity_report: N = " + std::to_string(N) + " spans only " + std::to_string(span) +
                        " hbar values");
        double mx = 0.0, mn = INFINITY;
        for (auto* r : rs) {
            mx = std::max(mx, r->error);
            mn = std::min(mn, r->error);
        }
        overall = std::max(overall, mx);
        s.rows.push_back({N, int(rs.size()), mx, mn, mn > 0.0 ? mx / mn : (mx > 0.0 ? INFINITY : 1.0)});
    }
    if (s.rows.empty()) throw Error("uniformity_report: no records");
    s.degenerate = overall < 1e-12;
    s.pass = true;
    for (auto& r : s.rows) {
        if (s.degenerate) r.ratio = 1.0;
        if (!(r.ratio < ceiling)) s.pass = false;
    }
    return s;
}

LogLogFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw Error("loglog_slope: need at least 3 points");
    double n = double(points.size()), sx = 0, sy = 0;
    for (auto [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw Error("loglog_slope: values must be positive");
        sx += std::log(x);
        sy += std::log(y);
    }
    double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : points) {
        double u = std::log(x) - mx, v = std::log(y) - my;
        sxx += u * u;
        sxy += u * v;
        syy += v * v;
    }
    if (sxx == 0.0) throw Error("loglog_slope: x values are all equal");
    double slope = sxy / sxx;
    double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return {slope, my - slope * mx, r2};
}

double trace_distance(const GridOperator& K1, const GridOperator& K2) {
    if (!(K1.grid == K2.grid)) throw Error("trace_distance: operators live on different grids");
    return trace_norm(K1.mat - K2.mat);
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string records_csv(const std::vector<ConvergenceRecord>& records) {
    std::string s = std::string(kConvergeCsvHeader) + "\n";
    for (const auto& r : records)
        s += std::to_string(r.N) + "," + num(r.hbar) + "," + num(r.t) + "," + std::to_string(r.M) + "," + num(r.dt) +
             "," + num(r.error) + "," + num(r.argmax_alpha) + "," + num(r.argmax_beta) + "," + num(r.wall_ms) + "\n";
    return s;
}

std::vector<ConvergenceRecord> parse_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kConvergeCsvHeader) throw Error("records csv: missing or wrong header");
    std::vector<ConvergenceRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw Error("records csv: expected 9 fields in '" + line + "'");
        ConvergenceRecord r;
        r.N = std::stoi(f[0]);
        r.hbar = std::stod(f[1]);
        r.t = std::stod(f[2]);
        r.M = std::stoi(f[3]);
        r.dt = std::stod(f[4]);
        r.error = std::stod(f[5]);
        r.argmax_alpha = std::stod(f[6]);
        r.argmax_beta = std::stod(f[7]);
        r.wall_ms = std::stod(f[8]);
        out.push_back(r);
    }
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest failed");
    std::ostringstream o;
    for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return o.str();
}

void emit_report(const std::vector<ConvergenceRecord>& records, const std::string& path, const std::string& format,
                 const std::string& config_json) {
    std::string body;
    if (format == "csv") {
        body = records_csv(records);
    } else if (format == "json") {
        nlohmann::ordered_json j;
        j["config"] = nlohmann::json::parse(config_json);
        j["records"] = nlohmann::json::array();
        for (const auto& r : records)
            j["records"].push_back({{"N", r.N},
                                    {"hbar", r.hbar},
                                    {"t", r.t},
                                    {"M", r.M},
                                    {"dt", r.dt},
                                    {"error", r.error},
                                    {"argmax_alpha", r.argmax_alpha},
                                    {"argmax_beta", r.argmax_beta},
                                    {"wall_ms", r.wall_ms}});
        j["hash"] = sha256_hex(records_csv(records));
        body = j.dump(2) + "\n";
    } else {
        throw Error("emit_report: unknown format '" + format + "'");
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("emit_report: cannot open " + path + " for writing");
    f << body;
    if (!f) throw Error("emit_report: write failed for " + path);
}

}  // namespace mfl
