#include "mfl/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mfl/kernels.hpp"

namespace mfl {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_f64(std::ostream& o, double v) {
    unsigned char b[8];
    std::memcpy(b, &v, 8);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    o.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error("binary payload is truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    double v;
    std::memcpy(&v, b, 8);
    return v;
}

const char* role_name(Role r) {
    switch (r) {
        case Role::density: return "density";
        case Role::unitary: return "unitary";
        default: return "generic";
    }
}

Role role_from(const std::string& s) {
    if (s == "density") return Role::density;
    if (s == "unitary") return Role::unitary;
    if (s == "generic") return Role::generic;
    throw Error("unknown operator role '" + s + "'");
}

template <class T>
T field(const Json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw Error(std::string(where) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string(where) + ": bad field '" + key + "': " + e.what());
    }
}

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw Error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Json grid_to_json(const Grid& g) { return Json{{"d", g.d}, {"M", g.M}, {"L", g.L}}; }

Grid grid_from_json(const Json& j) {
    int d = j.contains("d") ? field<int>(j, "d", "grid") : 1;
    return make_grid(d, field<int>(j, "M", "grid"), field<double>(j, "L", "grid"));
}

Json symbol_to_json(const FourierSymbol& a) {
    Json terms = Json::array();
    for (const auto& t : a.terms())
        terms.push_back({{"alpha", t.alpha}, {"beta", t.beta}, {"re", t.c.real()}, {"im", t.c.imag()}});
    return Json{{"grid", grid_to_json(a.grid())}, {"terms", terms}};
}

FourierSymbol symbol_from_json(const Json& j) { return symbol_from_json(j, grid_from_json(field<Json>(j, "grid", "symbol"))); }

FourierSymbol symbol_from_json(const Json& j, const Grid& fallback) {
    Grid g = j.contains("grid") ? grid_from_json(j.at("grid")) : fallback;
    if (!(g == fallback)) throw Error("symbol: grid does not match the configured grid");
    FourierSymbol a(g);
    for (const auto& t : field<Json>(j, "terms", "symbol")) {
        auto al = field<std::vector<double>>(t, "alpha", "symbol term");
        auto be = field<std::vector<double>>(t, "beta", "symbol term");
        if (int(al.size()) != g.d || int(be.size()) != g.d) throw Error("symbol term: frequency dimension mismatch");
        double im = t.contains("im") ? field<double>(t, "im", "symbol term") : 0.0;
        a.add(al, be, cplx(field<double>(t, "re", "symbol term"), im));
    }
    return a;
}

Json potential_to_json(const PotentialSeries& V) {
    if (!V.is_even()) throw Error("potential_to_json: only even real potentials have the +-m form");
    Json c = Json::array();
    for (int m = 0; m <= V.mmax(); ++m)
        if (V.hat(m) != cplx(0.0)) c.push_back({{"m", m}, {"re", V.hat(m).real()}, {"im", V.hat(m).imag()}});
    return Json{{"coeffs", c}};
}

PotentialSeries potential_from_json(const Grid& g, const Json& j) {
    const Json& cs = field<Json>(j, "coeffs", "potential");
    int mmax = 0;
    for (const auto& c : cs) mmax = std::max(mmax, std::abs(field<int>(c, "m", "potential coeff")));
    PotentialSeries V(g, mmax);
    for (const auto& c : cs) {
        int m = std::abs(field<int>(c, "m", "potential coeff"));
        double im = c.contains("im") ? field<double>(c, "im", "potential coeff") : 0.0;
        cplx v(field<double>(c, "re", "potential coeff"), im);
        V.set(m, v);
        V.set(-m, v);
    }
    return V;
}

void write_operator(const std::string& path, const GridOperator& op) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    Json h{{"format", "mfl-operator"},
           {"rows", op.mat.rows()},
           {"cols", op.mat.cols()},
           {"dtype", "complex128-le"},
           {"order", "row-major"},
           {"role", role_name(op.role)},
           {"grid", grid_to_json(op.grid)}};
    f << h.dump() << '\n';
    for (Eigen::Index r = 0; r < op.mat.rows(); ++r)
        for (Eigen::Index c = 0; c < op.mat.cols(); ++c) {
            put_f64(f, op.mat(r, c).real());
            put_f64(f, op.mat(r, c).imag());
        }
    if (!f) throw Error("write failed for " + path);
}

GridOperator read_operator(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw Error(path + ": missing header");
    Json h;
    try {
        h = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": bad header: " + e.what());
    }
    if (field<std::string>(h, "format", "operator header") != "mfl-operator")
        throw Error(path + ": not an operator file");
    auto rows = field<long>(h, "rows", "operator header"), cols = field<long>(h, "cols", "operator header");
    Grid g = grid_from_json(field<Json>(h, "grid", "operator header"));
    if (rows != g.dim() || cols != g.dim()) throw Error(path + ": shape does not match the grid");
    GridOperator op{g, CMatrix(rows, cols), role_from(field<std::string>(h, "role", "operator header"))};
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            double re = get_f64(f);
            op.mat(r, c) = cplx(re, get_f64(f));
        }
    if (f.peek() != std::char_traits<char>::eof()) throw Error(path + ": trailing bytes after payload");
    return op;
}

void write_checkpoint(const std::string& stem, const Checkpoint& c) {
    const NBodyState& s = c.state;
    if (s.amps.size() != kernels::tensor_size(s.grid.M, s.N)) throw Error("write_checkpoint: amplitude count mismatch");
    Json m{{"t", c.t},
           {"hbar", s.hbar},
           {"N", s.N},
           {"M", s.grid.M},
           {"L", s.grid.L},
           {"dt", c.dt},
           {"potential", potential_to_json(c.V)},
           {"payload", stem.substr(stem.find_last_of('/') + 1) + ".bin"}};
    write_text_file(stem + ".json", m.dump(2) + "\n");
    std::ofstream f(stem + ".bin", std::ios::binary);
    if (!f) throw Error("cannot open " + stem + ".bin for writing");
    for (const cplx& a : s.amps) {
        put_f64(f, a.real());
        put_f64(f, a.imag());
    }
    if (!f) throw Error("write failed for " + stem + ".bin");
}

Checkpoint read_checkpoint(const std::string& stem) {
    Json m = read_json_file(stem + ".json");
    Checkpoint c;
    Grid g = make_grid(1, field<int>(m, "M", "checkpoint"), field<double>(m, "L", "checkpoint"));
    c.t = field<double>(m, "t", "checkpoint");
    c.dt = field<double>(m, "dt", "checkpoint");
    c.V = potential_from_json(g, field<Json>(m, "potential", "checkpoint"));
    c.state.grid = g;
    c.state.N = field<int>(m, "N", "checkpoint");
    c.state.hbar = field<double>(m, "hbar", "checkpoint");
    if (c.state.N < 1 || c.state.N > 16) throw Error("checkpoint: bad particle count");
    std::size_t n = kernels::tensor_size(g.M, c.state.N);
    if (n > kMaxAmplitudes) throw Error("checkpoint: state is above the memory guard");
    std::ifstream f(stem + ".bin", std::ios::binary);
    if (!f) throw Error("cannot open " + stem + ".bin");
    c.state.amps.resize(n);
    for (auto& a : c.state.amps) {
        double re = get_f64(f);
        a = cplx(re, get_f64(f));
    }
    if (f.peek() != std::char_traits<char>::eof()) throw Error(stem + ".bin: trailing bytes after payload");
    return c;
}

std::string ensemble_csv(const ParticleEnsemble& z) {
    if (z.x.size() != z.xi.size()) throw Error("ensemble_csv: x and xi lengths differ");
    std::string s = "k,x,xi\n";
    char buf[96];
    for (int k = 0; k < z.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, z.x[k], z.xi[k]);
        s += buf;
    }
    return s;
}

std::string ensemble_manifest(const ParticleEnsemble& z, double L, std::uint64_t seed) {
    Json m{{"seed", seed}, {"count", z.size()}, {"L", L}, {"columns", {"k", "x", "xi"}}};
    return m.dump(2) + "\n";
}

void write_ensemble(const std::string& stem, const ParticleEnsemble& z, double L, std::uint64_t seed) {
    write_text_file(stem + ".csv", ensemble_csv(z));
    write_text_file(stem + ".json", ensemble_manifest(z, L, seed));
}

EnsembleFile read_ensemble(const std::string& stem) {
    Json m = read_json_file(stem + ".json");
    EnsembleFile e;
    e.seed = field<std::uint64_t>(m, "seed", "ensemble manifest");
    e.L = field<double>(m, "L", "ensemble manifest");
    int count = field<int>(m, "count", "ensemble manifest");
    std::istringstream in(read_text_file(stem + ".csv"));
    std::string line;
    if (!std::getline(in, line) || line != "k,x,xi") throw Error(stem + ".csv: missing or wrong header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int k;
        double x, xi;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &k, &x, &xi) != 3 || k != e.z.size())
            throw Error(stem + ".csv: bad row '" + line + "'");
        e.z.x.push_back(x);
        e.z.xi.push_back(xi);
    }
    if (e.z.size() != count) throw Error(stem + ".csv: row count does not match the manifest");
    return e;
}

ConvergeConfig converge_config_from_json(const Json& j) {
    ConvergeConfig c;
    c.grid = grid_from_json(field<Json>(j, "grid", "config"));
    if (c.grid.d != 1) throw Error("config: only d = 1 is supported");
    c.V = potential_from_json(c.grid, field<Json>(j, "potential", "config"));
    if (j.contains("initial")) {
        const Json& in = j.at("initial");
        c.initial.kind = in.value("kind", std::string("gaussian"));
        c.initial.width = in.value("width", 0.5);
        if (in.contains("center")) {
            auto ce = in.at("center");
            c.initial.center = ce.is_array() ? ce.at(0).get<double>() : ce.get<double>();
        }
    }
    const Json& t = field<Json>(j, "time", "config");
    c.T = field<double>(t, "T", "time");
    c.dt = field<double>(t, "dt", "time");
    if (!(c.dt > 0.0)) throw Error("config: dt must be positive");
    const Json& s = field<Json>(j, "scan", "config");
    c.Ns = field<std::vector<int>>(s, "N", "scan");
    c.hbars = field<std::vector<double>>(s, "hbar", "scan");
    for (double h : c.hbars)
        if (!(h > 0.0)) throw Error("config: hbar values must be positive");
    if (j.contains("dual_norm")) {
        const Json& d = j.at("dual_norm");
        c.family.order = d.value("order", 6);
        c.family.alpha_max = d.value("alpha_max", 4);
        c.family.beta_max = d.value("beta_max", 4);
    }
    c.seed = j.value("seed", std::uint64_t(7));
    c.timing = j.value("timing", false);
    c.uniformity_ceiling = j.value("uniformity_ceiling", 5.0);
    return c;
}

Json converge_config_to_json(const ConvergeConfig& c) {
    return Json{{"grid", grid_to_json(c.grid)},
                {"potential", potential_to_json(c.V)},
                {"initial", {{"kind", c.initial.kind}, {"width", c.initial.width}, {"center", {c.initial.center}}}},
                {"time", {{"T", c.T}, {"dt", c.dt}}},
                {"scan", {{"N", c.Ns}, {"hbar", c.hbars}}},
                {"dual_norm",
                 {{"order", c.family.order}, {"alpha_max", c.family.alpha_max}, {"beta_max", c.family.beta_max}}},
                {"seed", c.seed},
                {"timing", c.timing},
                {"uniformity_ceiling", c.uniformity_ceiling}};
}

}  // namespace mfl
