#pragma once

#include <stdexcept>
#include <vector>

#include "groupsurv/group.hpp"

namespace groupsurv {

// Requested size exceeds what an exact evaluator can enumerate.
class CapacityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxConstantMembers = 22;  // 2^22 subsets
inline constexpr int kMaxDelayedMembers = 14;   // ~3^14 (I, I') pairs

// P(A_I) under constant contagion: the members in `members` default on their
// own by the horizon, everyone else survives on their own and is dragged down
// by contagion. `members` must be nonempty.
double prob_a_i_constant(const GroupSpec& spec, SubsetMask members);

// One (I, I') term of the early-default split: `early` defaulted before the
// contagion cutoff, `members` \ `early` defaulted after it, and the
// complement of `members` goes down via contagion fired from `early` only.
// Requires a nonempty `early` contained in a nonempty `members` and a spec
// with early_default marginals.
double prob_term_delayed(const GroupSpec& spec, SubsetMask members, SubsetMask early);

// Probability that all regular members default, bucketed by the number of
// natural defaulters; index k holds the subsets of size k. Entry 0 is 0.
std::vector<double> all_default_by_size(const GroupSpec& spec);
double all_default_probability_constant(const GroupSpec& spec);
double survival_constant(const GroupSpec& spec);

// Same, under the early-default contagion cutoff.
std::vector<double> all_default_by_size_delayed(const GroupSpec& spec);
double all_default_probability_delayed(const GroupSpec& spec);
double survival_delayed(const GroupSpec& spec);

// Single-threaded textbook evaluators with plain products, kept as reference
// implementations for the parallel kernels above.
namespace serial {
double all_default_probability_constant(const GroupSpec& spec);
double survival_constant(const GroupSpec& spec);
double all_default_probability_delayed(const GroupSpec& spec);
double survival_delayed(const GroupSpec& spec);
}  // namespace serial

}  // namespace groupsurv
