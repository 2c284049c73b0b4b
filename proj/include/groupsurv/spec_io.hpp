#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "groupsurv/group.hpp"
#include "groupsurv/monte_carlo.hpp"

namespace groupsurv {

// Malformed or inconsistent spec file; the message carries the origin and,
// for JSON syntax errors, the line number.
class SpecFileError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationConfig {
    double horizon = 1.0;
    long trials = 100'000;
    std::uint64_t seed = 1;
    std::string family = "exponential";  // or "uniform-mixture"
    double contagion_gap = 0.0;          // "delta": cutoff gap for delayed contagion
    bool has_gap = false;
};

struct GroupSpecFile {
    GroupSpec group;
    bool delayed = false;  // delta_mode == "delayed"
    std::optional<SimulationConfig> simulation;
};

GroupSpecFile parse_group_spec_json(const std::string& text, const std::string& origin);
GroupSpecFile load_group_spec_file(const std::string& path);

// Assembles the simulation model the spec file describes. Member default
// times are exponential (or a uniform mixture) calibrated to each member's
// default probability; delayed specs with 0 < delta < horizon instead use
// piecewise-linear CDFs through both marginals so the early-default
// probabilities are honored exactly. Flags override file values.
mc::SimulationSpec make_simulation_spec(const GroupSpecFile& file,
                                        std::optional<long> trials_override = std::nullopt,
                                        std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace groupsurv
