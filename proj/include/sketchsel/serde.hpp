#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchsel/harness.hpp"
#include "sketchsel/sketch.hpp"

namespace sketchsel {

// Carried in a header comment (CSV) or a "_provenance" object (JSON) of every
// numeric output file: tool version, master seed and a hash of the settings
// that produced it.
struct Provenance {
    std::uint64_t seed = 0;
    std::string config_hash;
};

std::vector<std::string> provenance_comments(const Provenance& p);
std::string hash_hex(const std::string& content);

// DesignOutcome JSON: {method, n, p, direction, constrained, indices[],
// objective, wall_time_s, H_s inline or as a CSV path}.
std::string outcome_to_json(const DesignOutcome& outcome, Direction direction, bool constrained,
                            const Provenance& prov, const std::string& hs_csv_path = "");

struct LoadedOutcome {
    DesignOutcome outcome;
    Direction direction = Direction::Direct;
    bool constrained = false;
};

// `base_dir` resolves a relative H_s CSV path.
LoadedOutcome outcome_from_json(const std::string& text, const std::string& base_dir = ".");

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

// Deterministic view: method, p, sigma_coeff, rel_mse_mean, rel_mse_stderr and
// the error column. Timing fields vary run to run and live in the JSON view
// only, so equal seeds produce byte-identical CSV.
std::string table_to_csv(const ResultTable& table, const Provenance& prov);
std::string table_to_json(const ResultTable& table, const Provenance& prov);

}  // namespace sketchsel
