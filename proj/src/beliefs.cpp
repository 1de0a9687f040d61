#include "moreas/beliefs.hpp"

#include <cmath>
#include <stdexcept>

#include "moreas/mathutil.hpp"

namespace moreas {

double conditional_range_factor() {
    static const double factor = 1.0 / (std::sqrt(M_PI) * erfc_inv(0.5));
    return factor;
}

BeliefDist::BeliefDist(double median, double iqr) : median_(median), iqr_(iqr) {
    if (!std::isfinite(median) || !std::isfinite(iqr))
        throw std::invalid_argument("BeliefDist: median and iqr must be finite");
    if (!(iqr > 0.0)) throw std::invalid_argument("BeliefDist: iqr must be > 0");
    sd_ = iqr / (2.0 * z75());
}

double BeliefDist::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("BeliefDist::quantile: q outside (0,1)");
    return median_ + sd_ * normal_quantile(q);
}

double BeliefDist::cdf(double x) const { return normal_cdf((x - median_) / sd_); }

double BeliefDist::conditional_range() const { return iqr_ * conditional_range_factor(); }

double BeliefDist::revise_median(MessageDirection msg, double a) const {
    if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("revise_median: a outside [0,1]");
    if (a == 0.5) return median_;
    // mass the revised belief puts on the upper half-distribution
    const double w = (msg == MessageDirection::GreaterThan) ? a : 1.0 - a;
    // G(x) = w * max(2F-1, 0) + (1-w) * min(2F, 1); solve G = 1/2 for F
    const double q = (w >= 0.5) ? 1.0 - 1.0 / (4.0 * w) : 1.0 / (4.0 * (1.0 - w));
    return quantile(q);
}

}  // namespace moreas
