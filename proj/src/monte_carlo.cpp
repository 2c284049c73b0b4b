#include "groupsurv/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace groupsurv::mc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxSimMembers = 64;  // member sets are 64-bit masks

bool is_prob(double v) { return v >= 0.0 && v <= 1.0; }

std::optional<std::string> validate_matrix(const std::vector<double>& q, int n,
                                           const char* label) {
    std::ostringstream msg;
    if (q.size() != static_cast<std::size_t>(n) * n) {
        msg << label << " must be " << n << "x" << n;
        return msg.str();
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = q[static_cast<std::size_t>(i) * n + j];
            if (!is_prob(v)) {
                msg << label << "[" << i << "][" << j << "] out of range: " << v;
                return msg.str();
            }
            if (i == j && v != 0.0) {
                msg << label << "[" << i << "][" << j << "] nonzero diagonal";
                return msg.str();
            }
        }
    return std::nullopt;
}

}  // namespace

double calibrated_rate(double c1, double horizon) {
    if (!is_prob(c1)) throw std::domain_error("default probability out of range");
    if (!(horizon > 0.0)) throw std::domain_error("horizon must be positive");
    return -std::log1p(-c1) / horizon;  // +inf when c1 = 1
}

DefaultTimeDistribution DefaultTimeDistribution::exponential(double rate) {
    DefaultTimeDistribution d;
    d.kind = Kind::Exponential;
    d.rate = rate;
    return d;
}

DefaultTimeDistribution DefaultTimeDistribution::exponential_with_default_prob(double c1,
                                                                               double horizon) {
    return exponential(calibrated_rate(c1, horizon));
}

DefaultTimeDistribution DefaultTimeDistribution::uniform_mixture(double default_prob) {
    DefaultTimeDistribution d;
    d.kind = Kind::UniformMixture;
    d.default_mass = default_prob;
    return d;
}

DefaultTimeDistribution DefaultTimeDistribution::table(
    std::vector<std::pair<double, double>> knots, bool linear_interp) {
    DefaultTimeDistribution d;
    d.kind = Kind::Table;
    d.knots = std::move(knots);
    d.linear_interp = linear_interp;
    return d;
}

std::optional<std::string> DefaultTimeDistribution::validate() const {
    switch (kind) {
        case Kind::Exponential:
            if (!(rate >= 0.0)) return "exponential rate must be nonnegative";
            return std::nullopt;
        case Kind::UniformMixture:
            if (!is_prob(default_mass)) return "mixture default probability out of range";
            return std::nullopt;
        case Kind::Table: {
            if (knots.empty()) return "cdf table needs at least one knot";
            double prev_t = -1.0, prev_f = 0.0;
            for (const auto& [t, f] : knots) {
                if (!(t >= 0.0)) return "cdf table times must be nonnegative";
                if (!(t > prev_t)) return "cdf table times must be strictly increasing";
                if (!is_prob(f)) return "cdf table values must lie in [0, 1]";
                if (f < prev_f) return "cdf table must be non-decreasing";
                prev_t = t;
                prev_f = f;
            }
            return std::nullopt;
        }
    }
    return "unknown distribution kind";
}

double DefaultTimeDistribution::cdf(double t, double horizon) const {
    if (t < 0.0) return 0.0;
    switch (kind) {
        case Kind::Exponential:
            return rate == kInf ? 1.0 : -std::expm1(-rate * t);
        case Kind::UniformMixture:
            return default_mass * std::clamp(t / horizon, 0.0, 1.0);
        case Kind::Table: {
            if (t < knots.front().first) return 0.0;
            if (t >= knots.back().first) return knots.back().second;
            std::size_t idx = 0;
            while (idx + 1 < knots.size() && knots[idx + 1].first <= t) ++idx;
            if (!linear_interp || idx + 1 >= knots.size()) return knots[idx].second;
            const auto& [t0, f0] = knots[idx];
            const auto& [t1, f1] = knots[idx + 1];
            return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
        }
    }
    return 0.0;
}

double DefaultTimeDistribution::sample(SplitMix64& rng, double horizon) const {
    switch (kind) {
        case Kind::Exponential: {
            const double u = rng.next_unit();
            if (rate == 0.0) return kInf;
            if (rate == kInf) return 0.0;
            return -std::log1p(-u) / rate;
        }
        case Kind::UniformMixture: {
            const double u = rng.next_unit();
            if (u >= default_mass) return kInf;
            return rng.next_unit() * horizon;
        }
        case Kind::Table: {
            const double u = rng.next_unit();
            if (u >= knots.back().second) return kInf;
            if (!linear_interp) {
                for (const auto& [t, f] : knots)
                    if (u < f) return t;
                return kInf;  // unreachable
            }
            double prev_t = knots.front().first, prev_f = 0.0;
            // mass below the first knot sits exactly at it
            if (u < knots.front().second) return knots.front().first;
            prev_f = knots.front().second;
            for (std::size_t idx = 1; idx < knots.size(); ++idx) {
                const auto& [t, f] = knots[idx];
                if (u < f) return prev_t + (t - prev_t) * (u - prev_f) / (f - prev_f);
                prev_t = t;
                prev_f = f;
            }
            return kInf;  // unreachable
        }
    }
    return kInf;
}

ContagionSchedule ContagionSchedule::constant(std::vector<double> q, int members) {
    ContagionSchedule s;
    s.kind = Kind::Constant;
    s.members = members;
    s.base = std::move(q);
    return s;
}

ContagionSchedule ContagionSchedule::delayed(std::vector<double> q, int members, double gap) {
    ContagionSchedule s;
    s.kind = Kind::Delayed;
    s.members = members;
    s.base = std::move(q);
    s.gap = gap;
    return s;
}

ContagionSchedule ContagionSchedule::piecewise(std::vector<double> breakpoints,
                                               std::vector<std::vector<double>> segments,
                                               int members) {
    ContagionSchedule s;
    s.kind = Kind::Piecewise;
    s.members = members;
    s.breakpoints = std::move(breakpoints);
    s.segments = std::move(segments);
    return s;
}

std::optional<std::string> ContagionSchedule::validate() const {
    switch (kind) {
        case Kind::Constant:
            return validate_matrix(base, members, "contagion");
        case Kind::Delayed:
            if (!(gap >= 0.0)) return "contagion gap must be nonnegative";
            return validate_matrix(base, members, "contagion");
        case Kind::Piecewise: {
            if (breakpoints.empty()) return "piecewise schedule needs breakpoints";
            if (breakpoints.front() != 0.0) return "piecewise breakpoints must start at 0";
            for (std::size_t s = 1; s < breakpoints.size(); ++s)
                if (!(breakpoints[s] > breakpoints[s - 1]))
                    return "piecewise breakpoints must be strictly increasing";
            if (segments.size() != breakpoints.size())
                return "piecewise schedule needs one matrix per breakpoint";
            for (std::size_t s = 0; s < segments.size(); ++s) {
                if (auto err = validate_matrix(segments[s], members, "contagion")) return err;
                if (s > 0)
                    for (std::size_t e = 0; e < segments[s].size(); ++e)
                        if (segments[s][e] > segments[s - 1][e])
                            return "piecewise contagion must be non-increasing in time";
            }
            return std::nullopt;
        }
    }
    return "unknown schedule kind";
}

double ContagionSchedule::value(int i, int j, double t, double horizon) const {
    if (t > horizon) return 0.0;
    const std::size_t flat = static_cast<std::size_t>(i) * members + j;
    switch (kind) {
        case Kind::Constant:
            return base[flat];
        case Kind::Delayed:
            return t <= horizon - gap ? base[flat] : 0.0;
        case Kind::Piecewise: {
            std::size_t idx = 0;
            while (idx + 1 < breakpoints.size() && breakpoints[idx + 1] <= t) ++idx;
            return segments[idx][flat];
        }
    }
    return 0.0;
}

std::optional<std::string> validate(const SimulationSpec& spec) {
    std::ostringstream msg;
    const int n = static_cast<int>(spec.members.size());
    if (n < 1) return "simulation needs at least one regular member";
    if (n > kMaxSimMembers) {
        msg << "simulation supports at most " << kMaxSimMembers << " members (got " << n << ")";
        return msg.str();
    }
    if (!(spec.horizon > 0.0)) return "horizon must be positive";
    if (spec.trials < 1) return "trials must be at least 1";
    if (auto err = spec.leader.validate()) return "leader distribution: " + *err;
    for (int i = 0; i < n; ++i)
        if (auto err = spec.members[i].validate()) {
            msg << "member " << i << " distribution: " << *err;
            return msg.str();
        }
    if (spec.schedule.members != n) return "schedule size does not match the member count";
    if (auto err = spec.schedule.validate()) return *err;
    return std::nullopt;
}

TrialOutcome sample_trial(const SimulationSpec& spec, long trial_index) {
    SplitMix64 rng = trial_stream(spec.seed, static_cast<std::uint64_t>(trial_index));
    const int n = static_cast<int>(spec.members.size());
    if (n < 1 || n > kMaxSimMembers)
        throw std::invalid_argument("sample_trial: member count outside [1, 64]");
    const double horizon = spec.horizon;

    const double leader_time = spec.leader.sample(rng, horizon);
    double times[kMaxSimMembers];
    std::uint64_t natural = 0;
    for (int i = 0; i < n; ++i) {
        times[i] = spec.members[i].sample(rng, horizon);
        if (times[i] <= horizon) natural |= std::uint64_t{1} << i;
    }

    // Only natural defaulters fire contagion, and only at surviving members;
    // one Bernoulli draw per (defaulter, survivor) pair, i-major order.
    std::uint64_t victims = 0;
    for (int i = 0; i < n; ++i) {
        if (!(natural >> i & 1)) continue;
        for (int j = 0; j < n; ++j) {
            if (j == i || (natural >> j & 1)) continue;
            const double u = rng.next_unit();
            if (u < spec.schedule.value(i, j, times[i], horizon))
                victims |= std::uint64_t{1} << j;
        }
    }

    const std::uint64_t everyone = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    TrialOutcome outcome;
    outcome.leader_defaulted = leader_time <= horizon;
    outcome.natural_defaulters = natural;
    outcome.contagion_victims = victims;
    outcome.group_defaulted = outcome.leader_defaulted || ((natural | victims) == everyone);
    return outcome;
}

namespace {

SurvivalEstimate summarize(long survived, const SimulationSpec& spec) {
    const double p = static_cast<double>(survived) / static_cast<double>(spec.trials);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(spec.trials));
    return {p, se, p - 1.96 * se, p + 1.96 * se, spec.trials, spec.seed};
}

}  // namespace

SurvivalEstimate estimate_survival(const SimulationSpec& spec) {
    if (auto err = validate(spec)) throw std::invalid_argument(*err);
    long survived = 0;
#pragma omp parallel for schedule(static) reduction(+ : survived)
    for (long long t = 0; t < static_cast<long long>(spec.trials); ++t)
        survived += sample_trial(spec, static_cast<long>(t)).group_defaulted ? 0 : 1;
    return summarize(survived, spec);
}

namespace serial {

SurvivalEstimate estimate_survival(const SimulationSpec& spec) {
    if (auto err = validate(spec)) throw std::invalid_argument(*err);
    long survived = 0;
    for (long t = 0; t < spec.trials; ++t)
        survived += sample_trial(spec, t).group_defaulted ? 0 : 1;
    return summarize(survived, spec);
}

}  // namespace serial

}  // namespace groupsurv::mc
