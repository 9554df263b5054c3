#include "mfl/suites.hpp"
#include "probes.hpp"

namespace mfl {

using namespace probes;

namespace {

const char* kDefaultClassical = R"({
  "grid": {"d": 1, "M": 16, "L": 6.283185307179586},
  "potential": {"coeffs": [{"m": 1, "re": 0.25}, {"m": 2, "re": 0.15}]},
  "initial": {"cos_modes": [[1, 0.5], [2, -0.2]], "xi_mean": 0.3, "xi_sigma": 0.8},
  "N": 8,
  "samples": 10000,
  "time": {"T": 1.0, "dt": 0.01},
  "seed": 7
})";

// closed form of the mean of cos(a x + b xi) under f1 transported by free flow for time t
double free_mean(const ProductDensity& f, int n, double beta, double t) {
    double rho_hat = n == 0 ? 1.0 : 0.0;  // int cos(w_n x) rho(x) dx; sin moments vanish for a cosine profile
    for (auto [m, a] : f.cos_modes)
        if (n != 0 && m == std::abs(n)) rho_hat = 0.5 * a;
    double b = beta + f.grid.omega(n) * t;
    return rho_hat * std::cos(b * f.xi_mean) * std::exp(-0.5 * b * b * f.xi_sigma * f.xi_sigma);
}

struct Stats {
    double mean = 0.0;
    double se = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    for (double x : v) s.mean += x;
    s.mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(var / (v.size() - 1) / v.size());
    return s;
}

}  // namespace

ClassicalConfig classical_config_from_json(const Json& j) {
    ClassicalConfig c;
    c.grid = grid_from_json(j.at("grid"));
    c.V = potential_from_json(c.grid, j.at("potential"));
    const Json& in = j.at("initial");
    c.f1.grid = c.grid;
    for (const auto& p : in.at("cos_modes")) c.f1.cos_modes.push_back({p.at(0).get<int>(), p.at(1).get<double>()});
    c.f1.xi_mean = in.value("xi_mean", 0.0);
    c.f1.xi_sigma = in.value("xi_sigma", 1.0);
    c.f1.validate();
    c.N = j.value("N", 8);
    c.samples = j.value("samples", 10000);
    c.T = j.at("time").value("T", 1.0);
    c.dt = j.at("time").value("dt", 0.01);
    c.seed = j.value("seed", std::uint64_t(7));
    if (c.N < 1 || c.samples < 2) throw Error("classical config: need N >= 1 and samples >= 2");
    if (!(c.T >= 0.0) || !(c.dt > 0.0)) throw Error("classical config: bad time settings");
    return c;
}

ClassicalConfig default_classical_config() { return classical_config_from_json(Json::parse(kDefaultClassical)); }
std::string default_classical_json() { return Json::parse(kDefaultClassical).dump(2) + "\n"; }

SuiteResult classical_suite(const ClassicalConfig& c) {
    Stopwatch clock;
    SuiteResult res;
    res.suite = "classical";
    const Grid& g = c.grid;

    // weak Vlasov residual on a 10-function family, three refinements with delta = 2 dt
    auto z0 = sample_product(c.f1, c.N, 1, c.seed).front();
    res.files["ensemble_initial.csv"] = ensemble_csv(z0);
    res.files["ensemble_initial.json"] = ensemble_manifest(z0, g.L, c.seed);
    const std::vector<std::pair<int, double>> family{{1, 0.5}, {-1, 0.3}, {2, 0.5}, {-2, -0.4}, {1, -0.7},
                                                     {3, 0.2}, {0, 0.6},  {1, 0.0}, {2, 1.0},   {-3, 0.5}};
    const std::vector<double> dts{0.02, 0.01, 0.005};
    const double tprobe = 0.5 * c.T;
    std::vector<ClassicalTrajectory> trs;
    for (double dt : dts) trs.push_back(newton_flow(z0, c.V, c.T, dt));
    std::string vcsv = "n,beta,dt,residual\n";
    double dev = 0.0, rmin = INFINITY, rmax = 0.0;
    for (auto [n, beta] : family) {
        FourierSymbol phi = FourierSymbol::mode(g, g.omega(n), beta, 1.0);
        std::vector<double> r;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            r.push_back(vlasov_residual(trs[i], phi, tprobe, 2 * dts[i]));
            char buf[128];
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", n, beta, dts[i], r.back());
            vcsv += buf;
        }
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            double q = r[i] / r[i + 1];
            dev = std::max(dev, std::abs(q - 4.0));
            rmin = std::min(rmin, q);
            rmax = std::max(rmax, q);
        }
    }
    res.files["classical_vlasov.csv"] = vcsv;
    res.add_max(8, "weak_residual_halving_deviation", dev, 1.0, "ratios in [" + fmt(rmin) + ", " + fmt(rmax) + "]");

    // Monte Carlo over f1^{tensor N}
    auto zs = sample_product(c.f1, c.N, c.samples, c.seed + 1);
    auto zs_ind = sample_product(c.f1, c.N, c.samples, c.seed + 2);
    PotentialSeries zero = PotentialSeries::zero(g);
    const std::vector<std::pair<int, double>> obs{{1, 0.7}, {2, -0.4}, {1, 0.0}};
    double mom = 0.0, zmax = 0.0;
    std::vector<ParticleEnsemble> at_T(zs.size()), free_T(zs.size()), ind_T(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        auto tr = newton_flow(zs[i], c.V, c.T, c.dt);
        double p0 = 0.0;
        for (double v : zs[i].xi) p0 += v;
        for (const auto& f : tr.frames) {
            double p = 0.0;
            for (double v : f.xi) p += v;
            mom = std::max(mom, std::abs(p - p0));
        }
        at_T[i] = tr.frames.back();
        free_T[i] = newton_flow(zs[i], zero, c.T, c.dt).frames.back();
        ind_T[i] = newton_flow(zs_ind[i], c.V, c.T, c.dt).frames.back();
    }
    res.add_max(8, "verlet_momentum_drift", mom, 1e-12);

    std::string mcsv = "case,n,beta,mean,standard_error,reference,z\n";
    auto record = [&](const char* name, int n, double beta, Stats s, double ref, double se_ref) {
        double z = std::abs(s.mean - ref) / std::sqrt(s.se * s.se + se_ref * se_ref);
        zmax = std::max(zmax, z);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", name, n, beta, s.mean, s.se, ref, z);
        mcsv += buf;
    };
    for (auto [n, beta] : obs) {
        FourierSymbol phi = probes::cos_mode(g, n, beta, 1.0);
        std::vector<double> v0, vf, vi, v1;
        for (std::size_t i = 0; i < zs.size(); ++i) {
            v0.push_back(empirical_pair(zs[i], phi).real());
            vf.push_back(empirical_pair(free_T[i], phi).real());
            vi.push_back(empirical_pair(at_T[i], phi).real());
            v1.push_back(phi.eval(ind_T[i].x[0], ind_T[i].xi[0]).real());
        }
        record("initial", n, beta, stats(v0), free_mean(c.f1, n, beta, 0.0), 0.0);
        record("free", n, beta, stats(vf), free_mean(c.f1, n, beta, c.T), 0.0);
        Stats s1 = stats(v1);
        record("interacting", n, beta, stats(vi), s1.mean, s1.se);
    }
    res.files["classical_montecarlo.csv"] = mcsv;
    res.add_max(8, "marginal_montecarlo_max_z", zmax, 4.0,
                std::to_string(c.samples) + " samples, N = " + std::to_string(c.N));

    res.files["classical.csv"] = checks_csv(res);
    res.checks.push_back({8, "runtime_seconds", clock.seconds(), 0.0, true, "informational", true});
    return res;
}

}  // namespace mfl
