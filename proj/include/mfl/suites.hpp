#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mfl/cdyn.hpp"
#include "mfl/io.hpp"
#include "mfl/metrics.hpp"
#include "mfl/potential.hpp"

namespace mfl {

struct Check {
    int criterion = 0;
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
    bool timing = false;  // wall-clock checks stay out of the reports so reruns compare byte for byte
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    std::map<std::string, std::string> files;  // report name -> contents

    bool pass() const;
    void add(int criterion, std::string name, double value, double tolerance, bool pass, std::string note = {});
    // value <= tolerance
    void add_max(int criterion, std::string name, double value, double tolerance, std::string note = {});
};

// criterion,check,value,tolerance,pass
std::string checks_csv(const SuiteResult& r);
// one "[PASS] C<k> name: value (tol)" line per check
std::string checks_text(const SuiteResult& r);
// writes every report file into dir (created if missing)
void write_suite_files(const SuiteResult& r, const std::string& dir);

// Number of CSV reports whose bytes differ between two runs of the same suite (missing files count).
int csv_differences(const SuiteResult& a, const SuiteResult& b);
// the same as a criterion-10 check
Check determinism_check(const SuiteResult& a, const SuiteResult& b);

SuiteResult phasespace_suite(std::uint64_t seed);
SuiteResult algebra_suite(std::uint64_t seed);

ConvergeConfig default_converge_config();
std::string default_converge_json();
SuiteResult converge_suite(const ConvergeConfig& c, const std::string& checkpoint_dir = {});

struct EgorovCase {
    std::string name;
    FourierSymbol b;
    PotentialTimeline V;
};

struct EgorovConfig {
    Grid grid;
    double t = 1.0;
    double s = 0.0;
    double dt = 1e-3;
    std::vector<double> hbars{0.4, 0.2, 0.1, 0.05};
    std::vector<EgorovCase> cases;
    double slope_lo = 1.7;
    double slope_hi = 2.3;
    int min_cases = 3;

    // commutator scan
    Grid cgrid;
    FourierSymbol cb;
    PotentialTimeline cV;
    double cT = 1.0;
    std::vector<double> comegas;
    std::vector<double> chbars{1.0, 0.5, 0.25, 0.125};
    double spread_ceiling = 3.0;

    // identity probes: single-mode potentials m with amplitude, symbol modes (n, beta)
    std::vector<int> identity_v_modes{1, 2, 3};
    std::vector<std::pair<int, double>> identity_a_modes{{-2, 0.0}, {1, 0.7}, {3, -1.3}, {2, 2.1}};
    std::vector<double> identity_hbars{1.0, 0.3, 0.05};
};

EgorovConfig default_egorov_config();
std::string default_egorov_json();
EgorovConfig egorov_config_from_json(const Json& j);
SuiteResult egorov_suite(const EgorovConfig& c, const std::string& operator_dir = {});

struct ClassicalConfig {
    Grid grid;
    PotentialSeries V;
    ProductDensity f1;
    int N = 8;
    int samples = 10000;
    double T = 1.0;
    double dt = 0.01;
    std::uint64_t seed = 7;
};

ClassicalConfig default_classical_config();
std::string default_classical_json();
ClassicalConfig classical_config_from_json(const Json& j);
SuiteResult classical_suite(const ClassicalConfig& c);

}  // namespace mfl
