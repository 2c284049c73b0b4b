#include "groupsurv/group.hpp"

#include <sstream>

namespace groupsurv {

GroupSpec GroupSpec::uniform(double leader_survival, double c1, double q, int n) {
    GroupSpec spec;
    spec.leader_survival = leader_survival;
    spec.member_default.assign(n, c1);
    spec.contagion.assign(static_cast<std::size_t>(n) * n, q);
    for (int i = 0; i < n; ++i) spec.contagion[static_cast<std::size_t>(i) * n + i] = 0.0;
    return spec;
}

std::optional<std::string> validate(const GroupSpec& spec) {
    std::ostringstream msg;
    const int n = spec.size();
    if (n < 1) return "group must have at least one regular member";
    if (!in_unit_interval(spec.leader_survival)) {
        msg << "leader_survival out of range: " << spec.leader_survival;
        return msg.str();
    }
    for (int i = 0; i < n; ++i) {
        if (!in_unit_interval(spec.member_default[i])) {
            msg << "member_default[" << i << "] out of range: " << spec.member_default[i];
            return msg.str();
        }
    }
    if (spec.contagion.size() != static_cast<std::size_t>(n) * n) {
        msg << "contagion matrix must be " << n << "x" << n << " (got "
            << spec.contagion.size() << " entries)";
        return msg.str();
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double qij = spec.q(i, j);
            if (!in_unit_interval(qij)) {
                msg << "contagion[" << i << "][" << j << "] out of range: " << qij;
                return msg.str();
            }
            if (i == j && qij != 0.0) {
                msg << "contagion[" << i << "][" << j << "] nonzero diagonal: " << qij;
                return msg.str();
            }
        }
    }
    if (spec.has_early()) {
        if (spec.early_default.size() != static_cast<std::size_t>(n)) {
            msg << "early_default must list all " << n << " members (got "
                << spec.early_default.size() << ")";
            return msg.str();
        }
        for (int i = 0; i < n; ++i) {
            if (!in_unit_interval(spec.early_default[i])) {
                msg << "early_default[" << i << "] out of range: " << spec.early_default[i];
                return msg.str();
            }
            if (spec.early_default[i] > spec.member_default[i]) {
                msg << "early_default[" << i << "] exceeds member_default[" << i
                    << "]: " << spec.early_default[i] << " > " << spec.member_default[i];
                return msg.str();
            }
        }
    }
    return std::nullopt;
}

}  // namespace groupsurv
