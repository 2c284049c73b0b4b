#pragma once

namespace groupsurv {

// Secondary real branch of the Lambert W function: the solution w <= -1 of
// w * exp(w) = x for x in [-1/e, 0). Throws std::domain_error outside that
// interval. Residual |w*e^w - x| stays below 1e-13 * |x|.
double lambert_w_minus1(double x);

}  // namespace groupsurv
