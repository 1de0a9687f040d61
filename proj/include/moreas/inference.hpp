#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moreas/simulator.hpp"

namespace moreas {

/// logit with the experiment's endpoint replacement: a=0 maps to
/// logit(0.025) and a=1 to logit(0.975).
double clamp_logit(double a);

/// Two-sided winsorization at the given level using interpolated
/// percentiles (type-7 convention). Level 0.05 pins values below the 5th
/// and above the 95th percentile to those percentiles.
std::vector<double> winsorize(const std::vector<double>& values, double level = 0.05);

struct MotiveEstimate {
    int agent_id = 0;
    std::string topic_id;
    double m_hat = 0.0;             // direction-folded, estimates the slope itself
    double m_hat_winsorized = 0.0;  // per-topic 5% winsorization, reporting value
};

struct EstimateSet {
    double phi_hat = 0.0;
    std::map<int, double> logit_p_hat;   // per subject with >=1 neutral assessment
    std::vector<MotiveEstimate> motives;
    std::vector<std::string> dropped;    // one line per excluded subject/row
    /// set when phi_hat == 0 (all neutral assessments at their subject
    /// means): motives are undefined and left empty
    std::optional<std::string> motive_error;
};

/// Per-subject mean of clamped logit assessments over neutral rounds.
std::map<int, double> estimate_logit_priors(const Dataset& ds, std::vector<std::string>* dropped = nullptr);

/// phi_hat^2 = sum of squared neutral residuals / total assessed rounds.
double estimate_phi(const Dataset& ds, const std::map<int, double>& priors);

/// m_hat = dir * (logit a - logit p_hat) / (phi * R), R from the bounds.
/// Rows with zero-width bounds are dropped and logged.
std::vector<MotiveEstimate> estimate_motives(const Dataset& ds, const std::map<int, double>& priors,
                                             double phi, std::vector<std::string>* dropped = nullptr);

/// The closed-form MLE pipeline (priors, susceptibility, motives).
EstimateSet estimate_structural(const Dataset& ds);

struct RegressionResult {
    std::string model;
    std::vector<std::string> terms;
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> tstat;
    long n = 0;
    int n_clusters = 0;
};

/// OLS with optional subject within-transform, CR1 cluster-robust
/// covariance (factor (C/(C-1)) * ((n-1)/(n-k)), k counting absorbed
/// subject intercepts). The first n_protected columns must be
/// independent or the call throws, naming the collinear columns; later
/// columns (dummy controls) are silently dropped when collinear, the way
/// fixed-effects software treats redundant dummies.
RegressionResult ols_fe_clustered(const std::string& model_name, const std::vector<double>& y,
                                  std::vector<std::pair<std::string, std::vector<double>>> cols,
                                  const std::vector<int>& subject, bool absorb_subject,
                                  const std::vector<int>& cluster,
                                  std::size_t n_protected = SIZE_MAX);

/// Appends drop-first dummy columns for each observed level of a
/// categorical, named prefix=level.
void add_dummies(std::vector<std::pair<std::string, std::vector<double>>>& cols,
                 const std::string& prefix, const std::vector<std::string>& values);

struct GapCell {
    std::string direction;  // pro_party / anti_party / neutral
    std::string split;      // partisan / moderate / true_news / fake_news / all
    double demeaned_mean = 0.0;
    long n = 0;
};

struct GapEstimate {
    double estimate = 0.0;
    double se = 0.0;
    long n = 0;
};

struct GapStats {
    std::vector<GapCell> by_partisanship;  // direction x {partisan, moderate}
    std::vector<GapCell> by_veracity;      // direction x {true_news, fake_news}
    GapEstimate pro_minus_anti;            // politicized rounds
    GapEstimate fake_minus_true_politicized;
    GapEstimate fake_minus_true_neutral;
};

/// Subject-demeaned assessment means and raw gaps with clustered SEs.
GapStats gap_stats(const Dataset& ds);

struct FosdResult {
    bool dominates = false;     // CDF_A <= CDF_B at every grid point
    double max_violation = 0.0; // max positive CDF_A - CDF_B
    std::vector<double> cdf_a;  // at the 11 grid points
    std::vector<double> cdf_b;
};

FosdResult fosd_check(const std::vector<double>& group_a, const std::vector<double>& group_b);

struct CoverageCell {
    std::string topic_class;
    std::string group;  // all / partisan / moderate
    double coverage = 0.0;
    double se = 0.0;
    long n = 0;
};

/// Share of rounds whose elicited 50% interval covers the answer, by
/// topic class and partisan split (non-indifferent subjects).
std::vector<CoverageCell> ci_coverage(const Dataset& ds);

/// Follow-message regressions: on Pro-Party and on Polarizing news, each
/// without and with assessment-level controls (second-guess arm,
/// Pro/Anti politicized rounds, subject FE + topic and round dummies).
std::vector<RegressionResult> polarization_regression(const Dataset& ds);

/// Assessment regressions: a on Pro-Party (subject FE + topic and round
/// dummies) and a on True News without / with the Pro-Party control.
/// use_logit replaces the outcome with its clamped logit.
std::vector<RegressionResult> assessment_regressions(const Dataset& ds, bool use_logit);

}  // namespace moreas
