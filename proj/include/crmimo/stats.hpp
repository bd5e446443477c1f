#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace crmimo {

/// Inverse standard normal CDF (Acklam's rational approximation, |err| < 1.2e-9).
double probit(double p);

/// Wilson score interval half-width for a proportion at the given two-sided confidence.
double wilson_half_width(double p_hat, std::size_t n, double confidence);

/// Plug-in entropy in bits of an empirical distribution given by counts.
double plugin_entropy_bits(const std::vector<std::size_t>& counts);

inline double binary_entropy_bits(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;  // normal-approximation CI at the requested confidence
};

MeanCi mean_ci(const std::vector<double>& xs, double confidence);

}  // namespace crmimo
