#pragma once

#include <optional>
#include <string>
#include <vector>

namespace groupsurv {

// Identical members: every member defaults by the horizon with probability c1
// and infects any surviving member with the same factor q.
struct HomogeneousSpec {
    double leader_survival = 1.0;
    double c1 = 0.0;  // P(one member defaults by the horizon)
    double q = 0.0;   // uniform contagion factor
    long n = 1;       // number of regular members
};

std::optional<std::string> validate(const HomogeneousSpec& spec);

// CLI sweeps refuse group sizes beyond this; the evaluators themselves
// handle any n >= 1.
inline constexpr long kMaxSweepMembers = 10'000;

// Probability that all n members default. O(n).
double s_n(double c1, double q, long n);

// 1 - s_n as a direct nonnegative sum; keeps full relative accuracy when
// s_n is within rounding distance of 1.
double one_minus_s_n(double c1, double q, long n);

double survival(const HomogeneousSpec& spec);

// Closed forms for the q = 0 and q = 1 boundaries.
double survival_no_contagion(double leader_survival, double c1, long n);
double survival_full_contagion(double leader_survival, double c2, long n);

// Large-n estimate of s_n with the natural-default count replaced by its
// mean n*c1. Requires interior c1 and q.
double t_n_approx(double c1, double q, long n);

// C(n, k) for k = 0..n as doubles via the multiplicative recursion
// C(n,k+1) = C(n,k)*(n-k)/(k+1).
std::vector<double> binomial_row(int n);

namespace detail {
struct SnSums {
    double all_default;  // s_n
    double complement;   // 1 - s_n
};
// Direct path: binomial coefficients carried as doubles; valid while C(n,k)
// stays inside double range (n <= ~1020).
SnSums s_n_sums_direct(double c1, double q, long n);
// Log-space path: same recursion on log C(n,k); valid for any n.
SnSums s_n_sums_log(double c1, double q, long n);
}  // namespace detail

}  // namespace groupsurv
