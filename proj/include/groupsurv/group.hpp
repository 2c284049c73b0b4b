#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace groupsurv {

// Probabilities are carried as plain doubles; valid values lie in [0, 1].
// Range checking happens at the spec boundary (validate), not per value.
using Probability = double;

// Index set over regular members: bit i set <=> member i belongs to the set.
using SubsetMask = std::uint32_t;

inline bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

inline SubsetMask full_mask(int n) {
    return n >= 32 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1;
}

// Heterogeneous group: leader survival, per-member default marginals by the
// horizon, and the pairwise contagion matrix. early_default holds the
// marginals at horizon-minus-gap and is only consumed by the delayed
// evaluator; it stays empty otherwise.
struct GroupSpec {
    Probability leader_survival = 1.0;
    std::vector<Probability> member_default;  // P(member i defaults by T)
    std::vector<Probability> early_default;   // P(member i defaults by T - delta)
    std::vector<Probability> contagion;       // row-major n x n, q[i][j], zero diagonal

    int size() const { return static_cast<int>(member_default.size()); }
    bool has_early() const { return !early_default.empty(); }
    double q(int i, int j) const {
        return contagion[static_cast<std::size_t>(i) * member_default.size() + j];
    }

    // n identical members with default probability c1 and uniform contagion q.
    static GroupSpec uniform(double leader_survival, double c1, double q, int n);
};

// nullopt when every invariant holds, otherwise the first violation
// (with the offending index).
std::optional<std::string> validate(const GroupSpec& spec);

}  // namespace groupsurv
