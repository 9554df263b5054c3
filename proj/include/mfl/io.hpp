#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "mfl/cdyn.hpp"
#include "mfl/core.hpp"
#include "mfl/metrics.hpp"
#include "mfl/phasespace.hpp"
#include "mfl/potential.hpp"
#include "mfl/qdyn.hpp"

namespace mfl {

using Json = nlohmann::ordered_json;

Json grid_to_json(const Grid& g);
Grid grid_from_json(const Json& j);

// {"grid": {...}, "terms": [{"alpha": [..], "beta": [..], "re": .., "im": ..}]}
Json symbol_to_json(const FourierSymbol& a);
FourierSymbol symbol_from_json(const Json& j);
// same, but a missing "grid" falls back to g (config files list terms only)
FourierSymbol symbol_from_json(const Json& j, const Grid& g);

// {"coeffs": [{"m": 1, "re": 0.25, "im": 0}]}; each entry sets both +m and -m (m = 0 sets the mean)
Json potential_to_json(const PotentialSeries& V);
PotentialSeries potential_from_json(const Grid& g, const Json& j);

// One JSON header line, then rows*cols (re, im) float64 little-endian pairs in row-major order.
void write_operator(const std::string& path, const GridOperator& op);
GridOperator read_operator(const std::string& path);

struct Checkpoint {
    NBodyState state;
    double t = 0.0;
    double dt = 0.0;
    PotentialSeries V;
};

// <stem>.json manifest {t, hbar, N, M, L, dt, potential} and <stem>.bin amplitudes (float64 pairs, little-endian)
void write_checkpoint(const std::string& stem, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& stem);

// <stem>.csv with k,x,xi rows and <stem>.json manifest holding the seed
void write_ensemble(const std::string& stem, const ParticleEnsemble& z, double L, std::uint64_t seed);
std::string ensemble_csv(const ParticleEnsemble& z);
std::string ensemble_manifest(const ParticleEnsemble& z, double L, std::uint64_t seed);
struct EnsembleFile {
    ParticleEnsemble z;
    double L = 0.0;
    std::uint64_t seed = 0;
};
EnsembleFile read_ensemble(const std::string& stem);

ConvergeConfig converge_config_from_json(const Json& j);
Json converge_config_to_json(const ConvergeConfig& c);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mfl
