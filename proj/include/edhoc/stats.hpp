#pragma once

#include <cmath>
#include <cstdint>

namespace edhoc {

// Normal approximation to the binomial: how many standard deviations
// the observed success count sits from trials * p.
inline double binomial_z(uint64_t trials, uint64_t successes, double p) {
    double mean = static_cast<double>(trials) * p;
    double sd = std::sqrt(static_cast<double>(trials) * p * (1.0 - p));
    return (static_cast<double>(successes) - mean) / sd;
}

// Pass/fail threshold for rate experiments. At |z| <= 4 the chance of a
// false failure is below 1e-4 per gate.
inline constexpr double kZThreshold = 4.0;

}  // namespace edhoc
