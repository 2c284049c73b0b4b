#include "groupsurv/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace groupsurv {

namespace {

// Binomial coefficients as doubles stay finite up to C(1020, 510) ~ 1e306.
constexpr long kDirectPathLimit = 1000;

void require_args(double c1, double q, long n) {
    if (n < 1) throw std::domain_error("group size must be at least 1");
    if (!(c1 >= 0.0 && c1 <= 1.0)) throw std::domain_error("c1 must lie in [0, 1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("q must lie in [0, 1]");
}

struct Bracket {
    double value;       // (1 - c3^k)^(n-k)
    double complement;  // 1 - value
};

// Honors the 0^0 = 1 convention: the exponent-zero case wins over a zero base.
Bracket bracket_terms(double c3, long k, long n) {
    const long m = n - k;
    if (m == 0) return {1.0, 0.0};
    const double c3k = std::pow(c3, static_cast<double>(k));
    if (c3k >= 1.0) return {0.0, 1.0};  // q = 0: contagion never fires
    if (c3k <= 0.0) return {1.0, 0.0};  // q = 1: every survivor is caught
    const double log_value = static_cast<double>(m) * std::log1p(-c3k);
    return {std::exp(log_value), -std::expm1(log_value)};
}

detail::SnSums clamp_sums(double s, double comp) {
    return {std::clamp(s, 0.0, 1.0), std::clamp(comp, 0.0, 1.0)};
}

detail::SnSums s_n_sums(double c1, double q, long n) {
    require_args(c1, q, n);
    if (q <= 0.0) {
        // No contagion: all must default naturally, s_n = c1^n.
        if (c1 <= 0.0) return {0.0, 1.0};
        if (c1 >= 1.0) return {1.0, 0.0};
        const double log_all = static_cast<double>(n) * std::log(c1);
        return {std::exp(log_all), -std::expm1(log_all)};
    }
    return n <= kDirectPathLimit ? detail::s_n_sums_direct(c1, q, n)
                                 : detail::s_n_sums_log(c1, q, n);
}

}  // namespace

namespace detail {

SnSums s_n_sums_direct(double c1, double q, long n) {
    const double c2 = 1.0 - c1;
    const double c3 = 1.0 - q;
    double binom = 1.0;  // C(n, 0)
    double s = 0.0, comp = 0.0;
    for (long k = 0; k <= n; ++k) {
        if (k > 0) binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
        const double pmf = binom * std::pow(c1, static_cast<double>(k)) *
                           std::pow(c2, static_cast<double>(n - k));
        const Bracket b = bracket_terms(c3, k, n);
        s += pmf * b.value;
        comp += pmf * b.complement;
    }
    return clamp_sums(s, comp);
}

SnSums s_n_sums_log(double c1, double q, long n) {
    if (c1 <= 0.0) return {0.0, 1.0};  // only the k = 0 term, whose bracket is 0
    if (c1 >= 1.0) return {1.0, 0.0};  // only the k = n term, whose bracket is 1
    const double c3 = 1.0 - q;
    const double log_c1 = std::log(c1);
    const double log_c2 = std::log1p(-c1);
    double log_binom = 0.0;  // log C(n, 0)
    double s = 0.0, comp = 0.0;
    for (long k = 0; k <= n; ++k) {
        if (k > 0)
            log_binom += std::log(static_cast<double>(n - k + 1)) - std::log(static_cast<double>(k));
        const double pmf = std::exp(log_binom + static_cast<double>(k) * log_c1 +
                                    static_cast<double>(n - k) * log_c2);
        const Bracket b = bracket_terms(c3, k, n);
        s += pmf * b.value;
        comp += pmf * b.complement;
    }
    return clamp_sums(s, comp);
}

}  // namespace detail

std::optional<std::string> validate(const HomogeneousSpec& spec) {
    std::ostringstream msg;
    if (spec.n < 1) return "group size must be at least 1";
    if (!(spec.leader_survival >= 0.0 && spec.leader_survival <= 1.0)) {
        msg << "leader_survival out of range: " << spec.leader_survival;
        return msg.str();
    }
    if (!(spec.c1 >= 0.0 && spec.c1 <= 1.0)) {
        msg << "c1 out of range: " << spec.c1;
        return msg.str();
    }
    if (!(spec.q >= 0.0 && spec.q <= 1.0)) {
        msg << "q out of range: " << spec.q;
        return msg.str();
    }
    return std::nullopt;
}

double s_n(double c1, double q, long n) { return s_n_sums(c1, q, n).all_default; }

double one_minus_s_n(double c1, double q, long n) { return s_n_sums(c1, q, n).complement; }

double survival(const HomogeneousSpec& spec) {
    if (auto err = validate(spec)) throw std::domain_error(*err);
    return spec.leader_survival * one_minus_s_n(spec.c1, spec.q, spec.n);
}

double survival_no_contagion(double leader_survival, double c1, long n) {
    return leader_survival * (1.0 - std::pow(c1, static_cast<double>(n)));
}

double survival_full_contagion(double leader_survival, double c2, long n) {
    return leader_survival * std::pow(c2, static_cast<double>(n));
}

double t_n_approx(double c1, double q, long n) {
    if (n < 1) throw std::domain_error("group size must be at least 1");
    if (!(c1 > 0.0 && c1 < 1.0)) throw std::domain_error("c1 must lie strictly inside (0, 1)");
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie strictly inside (0, 1)");
    const double c3 = 1.0 - q;
    const double mean_defaults = static_cast<double>(n) * c1;
    const double c3_pow = std::exp(mean_defaults * std::log(c3));
    return std::exp((static_cast<double>(n) - mean_defaults) * std::log1p(-c3_pow));
}

std::vector<double> binomial_row(int n) {
    if (n < 0) throw std::domain_error("binomial_row: negative n");
    std::vector<double> row(static_cast<std::size_t>(n) + 1);
    row[0] = 1.0;
    for (int k = 1; k <= n; ++k)
        row[k] = row[k - 1] * static_cast<double>(n - k + 1) / static_cast<double>(k);
    return row;
}

}  // namespace groupsurv
