#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groupsurv/rng.hpp"

namespace groupsurv::mc {

// Marginal law of one natural default time. Sampling may return +infinity
// ("never defaults").
struct DefaultTimeDistribution {
    enum class Kind { Exponential, UniformMixture, Table };

    Kind kind = Kind::Exponential;
    double rate = 0.0;          // Exponential
    double default_mass = 0.0;  // UniformMixture: P(default by the horizon)
    bool linear_interp = false;
    std::vector<std::pair<double, double>> knots;  // Table: (t, F(t)), t ascending

    static DefaultTimeDistribution exponential(double rate);
    // Exponential calibrated so that P(eta <= horizon) = c1 exactly.
    static DefaultTimeDistribution exponential_with_default_prob(double c1, double horizon);
    // Defaults with probability `default_prob`, at a time uniform on
    // [0, horizon]; otherwise never defaults.
    static DefaultTimeDistribution uniform_mixture(double default_prob);
    static DefaultTimeDistribution table(std::vector<std::pair<double, double>> knots,
                                         bool linear_interp);

    std::optional<std::string> validate() const;
    double cdf(double t, double horizon) const;
    double sample(SplitMix64& rng, double horizon) const;
};

double calibrated_rate(double c1, double horizon);

// Time-dependent contagion factors q_ij(t); always 0 past the horizon and
// non-increasing in t.
struct ContagionSchedule {
    enum class Kind { Constant, Delayed, Piecewise };

    Kind kind = Kind::Constant;
    int members = 0;
    std::vector<double> base;  // row-major q matrix (Constant, Delayed)
    double gap = 0.0;          // Delayed: contagion needs eta_i <= horizon - gap
    std::vector<double> breakpoints;             // Piecewise: ascending, starts at 0
    std::vector<std::vector<double>> segments;   // Piecewise: one matrix per breakpoint

    static ContagionSchedule constant(std::vector<double> q, int members);
    static ContagionSchedule delayed(std::vector<double> q, int members, double gap);
    static ContagionSchedule piecewise(std::vector<double> breakpoints,
                                       std::vector<std::vector<double>> segments, int members);

    std::optional<std::string> validate() const;
    double value(int i, int j, double t, double horizon) const;
};

struct SimulationSpec {
    DefaultTimeDistribution leader;
    std::vector<DefaultTimeDistribution> members;
    ContagionSchedule schedule;
    double horizon = 1.0;
    long trials = 1;
    std::uint64_t seed = 0;
};

std::optional<std::string> validate(const SimulationSpec& spec);

struct TrialOutcome {
    bool leader_defaulted = false;
    std::uint64_t natural_defaulters = 0;  // eta_i <= horizon
    std::uint64_t contagion_victims = 0;   // survivors dragged down; disjoint from natural
    bool group_defaulted = false;
};

// Fully determined by (spec.seed, trial_index).
TrialOutcome sample_trial(const SimulationSpec& spec, long trial_index);

struct SurvivalEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
};

// Mean of the group-survival indicator. The reduction is an integer count,
// so the result is identical for any worker count.
SurvivalEstimate estimate_survival(const SimulationSpec& spec);

namespace serial {
SurvivalEstimate estimate_survival(const SimulationSpec& spec);
}  // namespace serial

}  // namespace groupsurv::mc
