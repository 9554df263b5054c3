#include <filesystem>

#include "mfl/egorov.hpp"
#include "mfl/suites.hpp"
#include "probes.hpp"

namespace mfl {

using namespace probes;

namespace {

// one source of truth for the defaults; the CLI can print it as a starting config
const char* kDefaultEgorov = R"({
  "grid": {"d": 1, "M": 64, "L": 6.283185307179586},
  "time": {"t": 1.0, "s": 0.0, "dt": 0.001},
  "scan": {"hbar": [0.4, 0.2, 0.1, 0.05]},
  "acceptance": {"slope_range": [1.7, 2.3], "min_cases": 3},
  "cases": [
    {"name": "cos_x_static",
     "symbol": {"terms": [{"alpha": [1.0], "beta": [0.0], "re": 0.5}, {"alpha": [-1.0], "beta": [0.0], "re": 0.5}]},
     "potential": {"coeffs": [{"m": 1, "re": 0.25}]}},
    {"name": "cos_2x_xi_two_mode",
     "symbol": {"terms": [{"alpha": [2.0], "beta": [0.5], "re": 0.5}, {"alpha": [-2.0], "beta": [-0.5], "re": 0.5}]},
     "potential": {"coeffs": [{"m": 1, "re": 0.2}, {"m": 2, "re": 0.1}]}},
    {"name": "cos_2x_xi_hartree",
     "symbol": {"terms": [{"alpha": [2.0], "beta": [0.5], "re": 0.5}, {"alpha": [-2.0], "beta": [-0.5], "re": 0.5}]},
     "potential": {"coeffs": [{"m": 1, "re": 0.25}],
                   "hartree": {"hbar": 0.5, "dt": 0.01, "width": 0.5, "center": 3.141592653589793}}},
    {"name": "cos_x_cos_xi_hartree",
     "symbol": {"terms": [{"alpha": [1.0], "beta": [0.0], "re": 0.5}, {"alpha": [-1.0], "beta": [0.0], "re": 0.5},
                          {"alpha": [0.0], "beta": [1.0], "re": 0.25}, {"alpha": [0.0], "beta": [-1.0], "re": 0.25}]},
     "potential": {"coeffs": [{"m": 1, "re": 0.25}],
                   "hartree": {"hbar": 0.5, "dt": 0.01, "width": 0.5, "center": 3.141592653589793}}}
  ],
  "commutator": {
    "grid": {"d": 1, "M": 64, "L": 25.132741228718345},
    "T": 1.0,
    "omega_modes": [1, 2, 4, 8],
    "hbar": [1.0, 0.5, 0.25, 0.125],
    "spread_ceiling": 3.0,
    "symbol": {"terms": [{"alpha": [1.0], "beta": [0.0], "re": 0.5}, {"alpha": [-1.0], "beta": [0.0], "re": 0.5}]},
    "potential": {"coeffs": [{"m": 4, "re": 0.25}]}
  },
  "identity": {"v_modes": [1, 2, 3], "a_modes": [[-2, 0.0], [1, 0.7], [3, -1.3], [2, 2.1]], "hbar": [1.0, 0.3, 0.05]}
})";

// static series, or the self-consistent field of a Hartree run when "hartree" is present
PotentialTimeline timeline_from_json(const Grid& g, const Json& j, double tmax) {
    PotentialSeries V = potential_from_json(g, j);
    if (!j.contains("hartree")) return PotentialTimeline(V);
    const Json& h = j.at("hartree");
    CVector psi = initial_state(g, {"gaussian", h.value("width", 0.5), h.value("center", kPi)});
    auto tr = hartree_evolve(g, HartreeEnsemble::pure(psi), V, tmax, h.value("dt", 0.01), h.value("hbar", 0.5));
    return tr.meanfield;
}

std::string cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* kEgorovHeader = "hbar,omega,t,s,defect,ratio,bound_denominator\n";

}  // namespace

EgorovConfig egorov_config_from_json(const Json& j) {
    EgorovConfig c;
    c.grid = grid_from_json(j.at("grid"));
    const Json& t = j.at("time");
    c.t = t.value("t", 1.0);
    c.s = t.value("s", 0.0);
    c.dt = t.value("dt", 1e-3);
    c.hbars = j.at("scan").at("hbar").get<std::vector<double>>();
    if (j.contains("acceptance")) {
        auto r = j["acceptance"].value("slope_range", std::vector<double>{1.7, 2.3});
        if (r.size() != 2) throw Error("egorov config: slope_range needs two values");
        c.slope_lo = r[0];
        c.slope_hi = r[1];
        c.min_cases = j["acceptance"].value("min_cases", 3);
    }
    double tmax = std::max(c.t, c.s);
    for (const auto& k : j.at("cases"))
        c.cases.push_back({k.at("name").get<std::string>(), symbol_from_json(k.at("symbol"), c.grid),
                           timeline_from_json(c.grid, k.at("potential"), tmax)});
    if (c.cases.empty()) throw Error("egorov config: no cases");

    const Json& cm = j.at("commutator");
    c.cgrid = grid_from_json(cm.at("grid"));
    c.cT = cm.value("T", 1.0);
    c.comegas.clear();
    for (int m : cm.at("omega_modes").get<std::vector<int>>()) c.comegas.push_back(c.cgrid.omega(m));
    c.chbars = cm.at("hbar").get<std::vector<double>>();
    c.spread_ceiling = cm.value("spread_ceiling", 3.0);
    c.cb = symbol_from_json(cm.at("symbol"), c.cgrid);
    c.cV = timeline_from_json(c.cgrid, cm.at("potential"), c.cT);

    if (j.contains("identity")) {
        const Json& id = j.at("identity");
        c.identity_v_modes = id.at("v_modes").get<std::vector<int>>();
        c.identity_a_modes.clear();
        for (const auto& p : id.at("a_modes")) c.identity_a_modes.push_back({p.at(0).get<int>(), p.at(1).get<double>()});
        c.identity_hbars = id.at("hbar").get<std::vector<double>>();
    }
    for (double h : c.hbars)
        if (!(h > 0.0 && h <= 1.0)) throw Error("egorov config: hbar must lie in (0, 1]");
    if (c.hbars.size() < 3) throw Error("egorov config: the slope fit needs at least 3 hbar values");
    if (c.comegas.size() < 3) throw Error("egorov config: the omega fit needs at least 3 modes");
    return c;
}

EgorovConfig default_egorov_config() { return egorov_config_from_json(Json::parse(kDefaultEgorov)); }

std::string default_egorov_json() { return Json::parse(kDefaultEgorov).dump(2) + "\n"; }

SuiteResult egorov_suite(const EgorovConfig& c, const std::string& operator_dir) {
    Stopwatch clock;
    SuiteResult res;
    res.suite = "egorov";
    Json summary;
    summary["time"] = {{"t", c.t}, {"s", c.s}, {"dt", c.dt}, {"M", c.grid.M}, {"L", c.grid.L}};

    // defect slopes
    int in_range = 0;
    std::string notes;
    Json cases = Json::array();
    for (const auto& k : c.cases) {
        std::string csv = kEgorovHeader;
        std::vector<std::pair<double, double>> pts;
        for (double h : c.hbars) {
            double d = egorov_defect(k.b, k.V, c.t, c.s, h, c.dt);
            pts.push_back({h, d});
            csv += cell(h) + ",," + cell(c.t) + "," + cell(c.s) + "," + cell(d) + ",,\n";
        }
        LogLogFit f = loglog_slope(pts);
        bool ok = f.slope >= c.slope_lo && f.slope <= c.slope_hi;
        in_range += ok;
        notes += (notes.empty() ? "" : "; ") + k.name + " " + fmt(f.slope);
        Json defects = Json::array();
        for (auto [h, d] : pts) defects.push_back({{"hbar", h}, {"defect", d}});
        cases.push_back({{"name", k.name},
                         {"slope", f.slope},
                         {"intercept", f.intercept},
                         {"r2", f.r2},
                         {"in_range", ok},
                         {"defects", defects}});
        res.files["egorov_" + k.name + ".csv"] = csv;
    }
    summary["cases"] = cases;
    summary["slope_range"] = {c.slope_lo, c.slope_hi};
    res.add(6, "cases_with_hbar_squared_slope", in_range, c.min_cases, in_range >= c.min_cases, notes);

    // commutator identity with the classical bracket, per mode pair
    double ident = 0.0;
    for (int m : c.identity_v_modes)
        for (auto [n, beta] : c.identity_a_modes)
            for (double h : c.identity_hbars) {
                PotentialSeries V = PotentialSeries::cosine(c.grid, m, 0.6);
                FourierSymbol a = FourierSymbol::mode(c.grid, c.grid.omega(n), beta, cplx(0.3, 0.1));
                ident = std::max(ident, bracket_identity_check(V, a, h));
            }
    summary["identity_max_residual"] = ident;
    res.add_max(6, "bracket_identity_residual", ident, 1e-8);

    // commutator ratios: flat in hbar, linear in omega
    auto rows = uniformity_scan(c.cb, c.cV, c.cT, c.comegas, c.chbars, c.dt);
    std::string ccsv = kEgorovHeader;
    for (const auto& r : rows)
        ccsv += cell(r.hbar) + "," + cell(r.omega) + "," + cell(r.t) + "," + cell(r.s) + ",," + cell(r.ratio) + "," +
                cell(r.denominator) + "\n";
    res.files["egorov_commutator.csv"] = ccsv;

    double spread = 0.0;
    Json per_omega = Json::array();
    for (double w : c.comegas) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& r : rows)
            if (r.omega == w) lo = std::min(lo, r.ratio), hi = std::max(hi, r.ratio);
        spread = std::max(spread, hi / lo);
        per_omega.push_back({{"omega", w}, {"min_ratio", lo}, {"max_ratio", hi}});
    }
    res.add(7, "ratio_spread_across_hbar", spread, c.spread_ceiling, spread < c.spread_ceiling, "worst omega");

    auto nmax = uniformity_max(rows, c.comegas);
    double nspread = *std::max_element(nmax.begin(), nmax.end()) / *std::min_element(nmax.begin(), nmax.end());
    res.add(7, "bound_normalized_spread_across_omega", nspread, c.spread_ceiling, nspread < c.spread_ceiling);

    double worst = 0.0;
    Json wslopes = Json::array();
    for (double h : c.chbars) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows)
            if (r.hbar == h) pts.push_back({r.omega, r.ratio});
        double s = loglog_slope(pts).slope;
        wslopes.push_back({{"hbar", h}, {"slope", s}});
        worst = std::max(worst, std::abs(s - 1.0));
    }
    res.add_max(7, "omega_slope_deviation_from_1", worst, 0.2);
    summary["commutator"] = {{"per_omega", per_omega},
                             {"normalized_max", nmax},
                             {"omega_slopes", wslopes},
                             {"bold_w", c.cV.bold_w()},
                             {"gamma2", c.cV.gamma2()}};

    if (!operator_dir.empty()) {
        std::filesystem::create_directories(operator_dir);
        const auto& k = c.cases.front();
        double h = c.hbars.back();
        auto base = std::filesystem::path(operator_dir);
        write_operator((base / (k.name + "_heisenberg.op")).string(), heisenberg_obs(k.b, k.V, c.t, c.s, h, c.dt));
        write_operator((base / (k.name + "_transported.op")).string(),
                       transported_quantization(k.b, k.V, c.t, c.s, h));
    }

    Json checks = Json::array();
    for (const auto& ch : res.checks)
        checks.push_back({{"criterion", ch.criterion}, {"check", ch.name}, {"value", ch.value}, {"pass", ch.pass}});
    summary["checks"] = checks;
    res.files["egorov.json"] = summary.dump(2) + "\n";
    res.files["egorov_checks.csv"] = checks_csv(res);
    res.checks.push_back({6, "runtime_seconds", clock.seconds(), 0.0, true, "informational", true});
    return res;
}

}  // namespace mfl
