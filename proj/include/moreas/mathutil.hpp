#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace moreas {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit: argument must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Standard normal quantile, Wichura's algorithm AS 241 (PPND16),
/// accurate to ~1 part in 1e16 over the full open unit interval.
double normal_quantile(double p);

/// Inverse complementary error function via the normal quantile.
inline double erfc_inv(double y) {
    if (!(y > 0.0 && y < 2.0)) throw std::domain_error("erfc_inv: argument must lie in (0,2)");
    return -normal_quantile(0.5 * y) / std::sqrt(2.0);
}

/// 75th-percentile standard normal deviate.
double z75();

/// Rounds a probability to the nearest point of the 11-value assessment
/// grid {0.0, 0.1, ..., 1.0}. Half-way ties round up: 0.75 -> 0.8.
inline double grid_round(double p) {
    int k = static_cast<int>(std::floor(p * 10.0 + 0.5));
    if (k < 0) k = 0;
    if (k > 10) k = 10;
    return k / 10.0;
}

/// True iff a is exactly one of the 11 grid values.
inline bool on_assessment_grid(double a) {
    for (int k = 0; k <= 10; ++k)
        if (a == k / 10.0) return true;
    return false;
}

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

/// Empirical quantile with linear interpolation between order statistics
/// (position p*(n-1) on the sorted sample; numpy/R type-7 convention).
double quantile_type7(std::vector<double> v, double p);

}  // namespace moreas
