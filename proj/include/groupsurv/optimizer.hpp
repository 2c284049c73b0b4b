#pragma once

#include <vector>

#include "groupsurv/exact.hpp"  // CapacityError

namespace groupsurv {

// Geometric tail rate a and crossover size N: 1 - s_n <= 3 * a^n for every
// n > N.
struct TailBoundConstants {
    double rate;     // a in (0, 1)
    long threshold;  // N >= 1
};

TailBoundConstants tail_bound_constants(double c1, double q);

// Real-valued upper bound on the survival-maximizing group size.
double prop2_upper_bound(double c1, double q);

// Smallest search horizon guaranteed to contain a delta-suboptimal size.
long prop3_suboptimal_bound(double c1, double q, double delta);

// Large-n optimizer estimate: the n solving c3^(n*c1) = 1/2.
double approx_optimizer_n_star(double c1, double q);

struct BoundReport {
    double tail_rate;     // a
    long tail_threshold;  // N
    double prop2_bound;
    double prop3_rate;    // b
    long prop3_bound;
    double n_star_estimate;
};

BoundReport bound_report(double c1, double q, double delta);

struct SurvivalPoint {
    long n;
    double survival;
};

struct SizeSearchResult {
    long best_n;           // smallest argmax over the curve
    double best_survival;
    long search_limit;     // U = min(ceil(prop2), prop3)
    double delta;          // suboptimality budget the limit was built with
    std::vector<SurvivalPoint> curve;  // n = 1..search_limit
};

// Group survival for n = 1..n_max; entries are evaluated independently so the
// result is identical for any worker count.
std::vector<SurvivalPoint> survival_curve(double leader_survival, double c1, double q,
                                          long n_max);

// Linear search over n = 1..U with U = min(ceil(prop2), prop3). Guaranteed
// within leader_survival * delta of the supremum over all n; exact-optimal
// whenever the prop2 bound is the smaller one.
SizeSearchResult search_optimal_size(double leader_survival, double c1, double q,
                                     double delta);

namespace serial {
std::vector<SurvivalPoint> survival_curve(double leader_survival, double c1, double q,
                                          long n_max);
}  // namespace serial

}  // namespace groupsurv
