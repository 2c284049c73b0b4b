#include "groupsurv/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace groupsurv {

namespace {

// 1 - prod_{i in sources} (1 - q_ij): the chance that at least one source
// fires contagion into j. Computed as -expm1(sum log1p(-q_ij)) while all
// q_ij < 1; a certain source short-circuits to 1 exactly.
double infection_bracket(const GroupSpec& spec, SubsetMask sources, int j) {
    double log_keep = 0.0;
    for (SubsetMask s = sources; s != 0; s &= s - 1) {
        const int i = std::countr_zero(s);
        const double qij = spec.q(i, j);
        if (qij >= 1.0) return 1.0;
        log_keep += std::log1p(-qij);
    }
    return -std::expm1(log_keep);
}

// log1p(-q_ij) cached per pair; the enumeration kernels visit each pair once
// per subset, and the logs dominate the per-subset cost otherwise. Summation
// order matches infection_bracket, so the cached path is bit-identical.
struct ContagionLogCache {
    int n;
    std::vector<double> log_keep;
    std::vector<unsigned char> certain;  // q_ij >= 1

    explicit ContagionLogCache(const GroupSpec& spec)
        : n(spec.size()),
          log_keep(static_cast<std::size_t>(n) * n, 0.0),
          certain(static_cast<std::size_t>(n) * n, 0) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double qij = spec.q(i, j);
                if (qij >= 1.0)
                    certain[static_cast<std::size_t>(i) * n + j] = 1;
                else
                    log_keep[static_cast<std::size_t>(i) * n + j] = std::log1p(-qij);
            }
    }

    double bracket(SubsetMask sources, int j) const {
        double acc = 0.0;
        for (SubsetMask s = sources; s != 0; s &= s - 1) {
            const int i = std::countr_zero(s);
            const std::size_t flat = static_cast<std::size_t>(i) * n + j;
            if (certain[flat]) return 1.0;
            acc += log_keep[flat];
        }
        return -std::expm1(acc);
    }
};

double prob_a_i_cached(const GroupSpec& spec, const ContagionLogCache& cache,
                       SubsetMask members, SubsetMask full) {
    double beta = 1.0;
    for (SubsetMask s = members; s != 0; s &= s - 1)
        beta *= spec.member_default[std::countr_zero(s)];
    if (members == full) return beta;
    double gamma = 1.0;
    for (SubsetMask rest = full & ~members; rest != 0; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        gamma *= (1.0 - spec.member_default[j]) * cache.bracket(members, j);
    }
    return beta * gamma;
}

double prob_term_delayed_cached(const GroupSpec& spec, const ContagionLogCache& cache,
                                SubsetMask members, SubsetMask early, SubsetMask full) {
    double beta = 1.0;
    for (SubsetMask s = early; s != 0; s &= s - 1)
        beta *= spec.early_default[std::countr_zero(s)];
    double gamma = 1.0;
    for (SubsetMask s = members & ~early; s != 0; s &= s - 1) {
        const int i = std::countr_zero(s);
        gamma *= spec.member_default[i] - spec.early_default[i];
    }
    double tau = 1.0;
    for (SubsetMask rest = full & ~members; rest != 0; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        tau *= (1.0 - spec.member_default[j]) * cache.bracket(early, j);
    }
    return beta * gamma * tau;
}

void require_valid(const GroupSpec& spec) {
    if (auto err = validate(spec)) throw std::invalid_argument(*err);
}

void require_members_in_range(const GroupSpec& spec, SubsetMask members, const char* op) {
    if (members == 0) throw std::invalid_argument(std::string(op) + ": empty index set");
    if ((members & ~full_mask(spec.size())) != 0)
        throw std::invalid_argument(std::string(op) + ": index set has bits beyond the group size");
}

// Fixed partition of the mask range [1, top], independent of the number of
// worker threads so the reduction order never changes.
struct MaskChunks {
    std::uint64_t top;
    int count;
    std::uint64_t lo(int c) const { return top * c / count + 1; }
    std::uint64_t hi(int c) const { return top * (c + 1) / count; }
};

MaskChunks make_chunks(int n) {
    const std::uint64_t top = (std::uint64_t{1} << n) - 1;
    return {top, static_cast<int>(std::min<std::uint64_t>(top, 256))};
}

std::vector<double> reduce_buckets(const std::vector<std::vector<double>>& partial, int n) {
    std::vector<double> by_size(static_cast<std::size_t>(n) + 1, 0.0);
    for (const auto& bucket : partial)
        for (int k = 0; k <= n; ++k) by_size[k] += bucket[k];
    return by_size;
}

double sum_by_size(const std::vector<double>& by_size) {
    double total = 0.0;
    for (std::size_t k = 1; k < by_size.size(); ++k) total += by_size[k];
    return std::clamp(total, 0.0, 1.0);
}

double product_member_default(const GroupSpec& spec) {
    double p = 1.0;
    for (int i = 0; i < spec.size(); ++i) p *= spec.member_default[i];
    return p;
}

}  // namespace

double prob_a_i_constant(const GroupSpec& spec, SubsetMask members) {
    require_members_in_range(spec, members, "prob_a_i_constant");
    const int n = spec.size();
    const SubsetMask full = full_mask(n);

    double beta = 1.0;
    for (SubsetMask s = members; s != 0; s &= s - 1)
        beta *= spec.member_default[std::countr_zero(s)];
    if (members == full) return beta;  // gamma = 1 by the empty-product convention

    double gamma = 1.0;
    for (SubsetMask rest = full & ~members; rest != 0; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        gamma *= (1.0 - spec.member_default[j]) * infection_bracket(spec, members, j);
    }
    return beta * gamma;
}

double prob_term_delayed(const GroupSpec& spec, SubsetMask members, SubsetMask early) {
    require_members_in_range(spec, members, "prob_term_delayed");
    if (early == 0) throw std::invalid_argument("prob_term_delayed: empty early set");
    if ((early & ~members) != 0)
        throw std::invalid_argument("prob_term_delayed: early set not contained in the index set");
    if (!spec.has_early())
        throw std::invalid_argument("prob_term_delayed: spec has no early_default marginals");
    const int n = spec.size();
    const SubsetMask full = full_mask(n);

    double beta = 1.0;
    for (SubsetMask s = early; s != 0; s &= s - 1)
        beta *= spec.early_default[std::countr_zero(s)];

    double gamma = 1.0;  // = 1 when early == members
    for (SubsetMask s = members & ~early; s != 0; s &= s - 1) {
        const int i = std::countr_zero(s);
        gamma *= spec.member_default[i] - spec.early_default[i];
    }

    double tau = 1.0;  // = 1 when members is the whole group
    for (SubsetMask rest = full & ~members; rest != 0; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        tau *= (1.0 - spec.member_default[j]) * infection_bracket(spec, early, j);
    }
    return beta * gamma * tau;
}

std::vector<double> all_default_by_size(const GroupSpec& spec) {
    require_valid(spec);
    const int n = spec.size();
    if (n > kMaxConstantMembers)
        throw CapacityError("group of " + std::to_string(n) + " members exceeds the exact enumeration cap of " +
                            std::to_string(kMaxConstantMembers) +
                            "; use the homogeneous fast path or Monte Carlo");

    const ContagionLogCache cache(spec);
    const SubsetMask full = full_mask(n);
    const MaskChunks chunks = make_chunks(n);
    std::vector<std::vector<double>> partial(
        chunks.count, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < chunks.count; ++c) {
        auto& bucket = partial[c];
        const std::uint64_t hi = chunks.hi(c);
        for (std::uint64_t m = chunks.lo(c); m <= hi; ++m) {
            const auto mask = static_cast<SubsetMask>(m);
            bucket[std::popcount(mask)] += prob_a_i_cached(spec, cache, mask, full);
        }
    }
    return reduce_buckets(partial, n);
}

double all_default_probability_constant(const GroupSpec& spec) {
    return sum_by_size(all_default_by_size(spec));
}

double survival_constant(const GroupSpec& spec) {
    return spec.leader_survival * (1.0 - all_default_probability_constant(spec));
}

std::vector<double> all_default_by_size_delayed(const GroupSpec& spec) {
    require_valid(spec);
    const int n = spec.size();
    if (!spec.has_early())
        throw std::invalid_argument("survival_delayed: spec has no early_default marginals");
    if (n > kMaxDelayedMembers)
        throw CapacityError("group of " + std::to_string(n) + " members exceeds the delayed enumeration cap of " +
                            std::to_string(kMaxDelayedMembers) + "; use Monte Carlo");

    const ContagionLogCache cache(spec);
    const SubsetMask full = full_mask(n);
    const MaskChunks chunks = make_chunks(n);
    std::vector<std::vector<double>> partial(
        chunks.count, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < chunks.count; ++c) {
        auto& bucket = partial[c];
        const std::uint64_t hi = chunks.hi(c);
        for (std::uint64_t m = chunks.lo(c); m <= hi; ++m) {
            const auto members = static_cast<SubsetMask>(m);
            const int k = std::popcount(members);
            if (members == full) {
                // All members default naturally; contagion is irrelevant, and
                // splitting by cutoff time telescopes back to the plain product.
                bucket[k] += product_member_default(spec);
                continue;
            }
            for (SubsetMask early = members; early != 0; early = (early - 1) & members)
                bucket[k] += prob_term_delayed_cached(spec, cache, members, early, full);
        }
    }
    return reduce_buckets(partial, n);
}

double all_default_probability_delayed(const GroupSpec& spec) {
    return sum_by_size(all_default_by_size_delayed(spec));
}

double survival_delayed(const GroupSpec& spec) {
    return spec.leader_survival * (1.0 - all_default_probability_delayed(spec));
}

namespace serial {

double all_default_probability_constant(const GroupSpec& spec) {
    if (auto err = validate(spec)) throw std::invalid_argument(*err);
    const int n = spec.size();
    if (n > kMaxConstantMembers) throw CapacityError("group too large for exact enumeration");
    const std::uint64_t top = (std::uint64_t{1} << n) - 1;
    double total = 0.0;
    for (std::uint64_t m = 1; m <= top; ++m) {
        double beta = 1.0;
        double gamma = 1.0;
        for (int i = 0; i < n; ++i)
            if (m >> i & 1) beta *= spec.member_default[i];
        for (int j = 0; j < n; ++j) {
            if (m >> j & 1) continue;
            double keep = 1.0;
            for (int i = 0; i < n; ++i)
                if (m >> i & 1) keep *= 1.0 - spec.q(i, j);
            gamma *= (1.0 - spec.member_default[j]) * (1.0 - keep);
        }
        total += beta * gamma;
    }
    return std::clamp(total, 0.0, 1.0);
}

double survival_constant(const GroupSpec& spec) {
    return spec.leader_survival * (1.0 - serial::all_default_probability_constant(spec));
}

double all_default_probability_delayed(const GroupSpec& spec) {
    if (auto err = validate(spec)) throw std::invalid_argument(*err);
    if (!spec.has_early()) throw std::invalid_argument("spec has no early_default marginals");
    const int n = spec.size();
    if (n > kMaxDelayedMembers) throw CapacityError("group too large for delayed enumeration");
    const std::uint64_t top = (std::uint64_t{1} << n) - 1;
    double total = 0.0;
    for (std::uint64_t m = 1; m <= top; ++m) {
        if (m == top) {
            double all_natural = 1.0;
            for (int i = 0; i < n; ++i) all_natural *= spec.member_default[i];
            total += all_natural;
            continue;
        }
        const auto members = static_cast<SubsetMask>(m);
        for (SubsetMask early = members; early != 0; early = (early - 1) & members) {
            double beta = 1.0, gamma = 1.0, tau = 1.0;
            for (int i = 0; i < n; ++i) {
                if (early >> i & 1)
                    beta *= spec.early_default[i];
                else if (members >> i & 1)
                    gamma *= spec.member_default[i] - spec.early_default[i];
            }
            for (int j = 0; j < n; ++j) {
                if (members >> j & 1) continue;
                double keep = 1.0;
                for (int i = 0; i < n; ++i)
                    if (early >> i & 1) keep *= 1.0 - spec.q(i, j);
                tau *= (1.0 - spec.member_default[j]) * (1.0 - keep);
            }
            total += beta * gamma * tau;
        }
    }
    return std::clamp(total, 0.0, 1.0);
}

double survival_delayed(const GroupSpec& spec) {
    return spec.leader_survival * (1.0 - serial::all_default_probability_delayed(spec));
}

}  // namespace serial

}  // namespace groupsurv
