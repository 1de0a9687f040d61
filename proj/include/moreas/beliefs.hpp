#pragma once

#include "moreas/protocol.hpp"

namespace moreas {

/// Subjective belief over a question's answer: a normal distribution
/// parameterized by its elicited median and interquartile range, so the
/// reported guess and bounds are exact quantiles of the family.
class BeliefDist {
  public:
    /// Throws std::invalid_argument unless iqr > 0 and both arguments
    /// are finite (degenerate intervals are rejected at construction;
    /// the estimator likewise drops zero-width rows).
    BeliefDist(double median, double iqr);

    double median() const { return median_; }
    double iqr() const { return iqr_; }
    double sd() const { return sd_; }

    /// Inverse CDF; q must lie strictly inside (0,1).
    double quantile(double q) const;

    double cdf(double x) const;

    /// R = E[theta | theta > median] - E[theta | theta < median]
    ///   = iqr / (sqrt(pi) * erfc_inv(1/2))  ~= iqr * 1.1829
    /// The constant is computed, not hard-coded.
    double conditional_range() const;

    /// Median of the post-message belief a*F(.|message side) +
    /// (1-a)*F(.|other side): the Bayesian posterior over the answer
    /// given subjective P(message true) = a. Returns median() exactly
    /// at a = 1/2. Throws std::domain_error when a is outside [0,1].
    double revise_median(MessageDirection msg, double a) const;

  private:
    double median_;
    double iqr_;
    double sd_;
};

/// iqr -> conditional range conversion for raw bound widths.
double conditional_range_factor();

}  // namespace moreas
