#include "groupsurv/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "groupsurv/homogeneous.hpp"
#include "groupsurv/lambert.hpp"

namespace groupsurv {

namespace {

constexpr long kSearchLimitCap = 10'000'000;

void require_interior(double c1, double q) {
    if (!(c1 > 0.0 && c1 < 1.0)) throw std::domain_error("c1 must lie strictly inside (0, 1)");
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie strictly inside (0, 1)");
}

void require_leader(double leader_survival) {
    if (!(leader_survival >= 0.0 && leader_survival <= 1.0))
        throw std::domain_error("leader_survival must lie in [0, 1]");
}

}  // namespace

TailBoundConstants tail_bound_constants(double c1, double q) {
    require_interior(c1, q);
    const double c3 = 1.0 - q;
    const double rate = std::max(std::exp(-0.5 * c1 * c1), std::pow(c3, c1 / 3.0));
    const double alpha = (c1 / 6.0) * std::log(1.0 / c3);
    long threshold = 1;
    if (alpha <= 1.0 / std::numbers::e) {
        // Larger root of log x = alpha x; beyond it log(n)/n < alpha.
        const double root = -lambert_w_minus1(-alpha) / alpha;
        threshold = static_cast<long>(std::ceil(root));
    }
    return {rate, threshold};
}

double prop2_upper_bound(double c1, double q) {
    const TailBoundConstants tc = tail_bound_constants(c1, q);
    const double crossing = std::log((1.0 - c1) / 3.0) / std::log(tc.rate);
    return std::max(static_cast<double>(tc.threshold), crossing);
}

long prop3_suboptimal_bound(double c1, double q, double delta) {
    require_interior(c1, q);
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("delta must lie strictly inside (0, 1)");
    const double c3 = 1.0 - q;
    const double b = std::max(std::exp(-0.5 * c1 * c1), std::pow(c3, c1 / 2.0));
    const double bound = std::ceil(std::log(delta * (1.0 - b) / 2.0) / std::log(b));
    return std::max(1L, static_cast<long>(bound));
}

double approx_optimizer_n_star(double c1, double q) {
    require_interior(c1, q);
    return std::log(0.5) / (c1 * std::log(1.0 - q));
}

BoundReport bound_report(double c1, double q, double delta) {
    const TailBoundConstants tc = tail_bound_constants(c1, q);
    const double c3 = 1.0 - q;
    return {tc.rate,
            tc.threshold,
            prop2_upper_bound(c1, q),
            std::max(std::exp(-0.5 * c1 * c1), std::pow(c3, c1 / 2.0)),
            prop3_suboptimal_bound(c1, q, delta),
            approx_optimizer_n_star(c1, q)};
}

std::vector<SurvivalPoint> survival_curve(double leader_survival, double c1, double q,
                                          long n_max) {
    require_leader(leader_survival);
    if (n_max < 1) throw std::domain_error("n_max must be at least 1");
    std::vector<SurvivalPoint> curve(static_cast<std::size_t>(n_max));
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < static_cast<long long>(n_max); ++i) {
        const long n = static_cast<long>(i) + 1;
        curve[i] = {n, leader_survival * one_minus_s_n(c1, q, n)};
    }
    return curve;
}

SizeSearchResult search_optimal_size(double leader_survival, double c1, double q,
                                     double delta) {
    require_interior(c1, q);
    require_leader(leader_survival);
    const long from_prop2 = static_cast<long>(std::ceil(prop2_upper_bound(c1, q)));
    const long from_prop3 = prop3_suboptimal_bound(c1, q, delta);
    const long limit = std::min(from_prop2, from_prop3);
    if (limit > kSearchLimitCap)
        throw CapacityError("search limit U=" + std::to_string(limit) + " exceeds " +
                            std::to_string(kSearchLimitCap) +
                            "; the survival curve is too flat for a linear search at these parameters");

    SizeSearchResult result;
    result.search_limit = limit;
    result.delta = delta;
    result.curve = survival_curve(leader_survival, c1, q, limit);
    result.best_n = 1;
    result.best_survival = result.curve[0].survival;
    for (const auto& point : result.curve) {
        if (point.survival > result.best_survival) {  // strict: ties keep the smaller n
            result.best_survival = point.survival;
            result.best_n = point.n;
        }
    }
    return result;
}

namespace serial {

std::vector<SurvivalPoint> survival_curve(double leader_survival, double c1, double q,
                                          long n_max) {
    std::vector<SurvivalPoint> curve;
    curve.reserve(static_cast<std::size_t>(n_max));
    for (long n = 1; n <= n_max; ++n)
        curve.push_back({n, leader_survival * one_minus_s_n(c1, q, n)});
    return curve;
}

}  // namespace serial

}  // namespace groupsurv
