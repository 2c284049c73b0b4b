#include "groupsurv/lambert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace groupsurv {

namespace {

double residual(double w, double x) { return w * std::exp(w) - x; }

// w*e^w is monotone on (-inf, -1], rising from 0^- toward -1/e; plain
// bisection always lands on the branch.
double bisect(double x) {
    const double u = -std::log(-x);  // >= 1 on the domain
    double lo = -(u + 2.0 * std::log(std::max(u, 2.0)) + 4.0);
    double hi = -1.0;
    while (residual(lo, x) < 0.0) lo *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (residual(mid, x) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double halley_polish(double w, double x) {
    for (int it = 0; it < 50; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (f == 0.0) return w;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
        const double step = f / denom;
        if (!std::isfinite(step)) break;
        const double next = w - step;
        if (next >= -1.0) {
            w = -1.0 - 0.5 * (-1.0 - w);  // stay on the w <= -1 branch
            continue;
        }
        w = next;
        if (std::abs(step) <= 1e-16 * std::abs(w)) return w;
    }
    return w;
}

}  // namespace

double lambert_w_minus1(double x) {
    const double branch = -std::exp(-1.0);  // -1/e up to rounding
    if (std::isnan(x) || x >= 0.0 || x < branch - 1e-15)
        throw std::domain_error("lambert_w_minus1: argument must lie in [-1/e, 0)");
    if (x <= branch) return -1.0;

    double w;
    const double p2 = 2.0 * (1.0 + std::numbers::e * x);  // ~0 at the branch point
    if (p2 < 0.04) {
        // Series around the branch point in p = -sqrt(2(1 + e x)).
        const double p = -std::sqrt(std::max(p2, 0.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        if (w >= -1.0) w = std::nextafter(-1.0, -2.0);
    } else {
        const double log_mx = std::log(-x);
        w = log_mx - std::log(-log_mx);
    }
    w = halley_polish(w, x);
    if (std::abs(residual(w, x)) > 1e-14 * (-x)) w = halley_polish(bisect(x), x);
    return w;
}

}  // namespace groupsurv
