#pragma once

namespace certctrl {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF (quantile). Accurate to well below 1e-9
// absolute over p in [1e-12, 1 - 1e-12]. Throws std::domain_error for
// p outside (0, 1).
double inverse_normal_cdf(double p);

}  // namespace certctrl
