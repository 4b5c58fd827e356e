#pragma once

#include <cmath>

namespace adt {

// Standard normal distribution function.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Inverse of the standard normal distribution function.
// Acklam's rational approximation refined by one Halley step; accurate to
// full double precision over (0, 1).
double normal_quantile(double p);

}  // namespace adt
