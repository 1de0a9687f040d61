#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moreas/beliefs.hpp"
#include "moreas/protocol.hpp"
#include "moreas/rng.hpp"

namespace moreas {

enum class Party { ProDem, ProRep, Indifferent };
enum class UpdaterKind { Bayesian, Motivated, Generalized };

/// Shape of the motive function over answers: linear in theta (the
/// default), or a quadratic loss around the agent's own prior median
/// ("moderate" motives; message-invariant for symmetric beliefs).
enum class MotiveForm { Linear, Quadratic };

/// Immutable behavioral spec for one synthetic subject.
struct AgentSpec {
    int id = 0;
    Party party = Party::Indifferent;
    double partisanship = 0.0;  // abs rating gap in [0,1]
    UpdaterKind updater = UpdaterKind::Bayesian;
    MotiveForm motive_form = MotiveForm::Linear;
    double zeta = 1.0;   // prior weight, generalized rule
    double kappa = 1.0;  // likelihood weight, generalized rule
    double phi = 0.0;    // susceptibility: motive weight and noise sd
    /// noise sd when separated from phi for sensitivity runs; defaults to phi
    std::optional<double> noise_sd_override;
    std::map<std::string, double> motive_slopes;  // topic id -> m (per unit of theta)
    double prior_true = 0.5;                      // p_i
    double median_bias = 0.0;                     // b, scale units per unit partisanship
    double belief_noise = 0.5;                    // u, scale units
    double iqr_factor = 1.0;

    double noise_sd() const { return noise_sd_override.value_or(phi); }
    double motive_slope(const std::string& topic_id) const {
        auto it = motive_slopes.find(topic_id);
        return it == motive_slopes.end() ? 0.0 : it->second;
    }
};

/// Sign of the agent's motive for a topic: 0 on neutral topics and for
/// party-indifferent agents on politicized ones; +1 for everyone on own
/// performance; otherwise the party sign times the topic direction.
int motive_sign(const AgentSpec& agent, const TopicSpec& topic);

/// Prior belief calibration: median = theta + (bias + noise) * scale with
/// the iqr sized so an unbiased agent's 50% interval covers theta half
/// the time.
BeliefDist form_belief(const AgentSpec& agent, const TopicSpec& topic, RngStream& rng);

/// Log-odds assessment before noise rounding: the updating rule evaluated
/// at a pinned noise realization. dir(GreaterThan)=+1, dir(LessThan)=-1.
double assessment_logit(const AgentSpec& agent, const TopicSpec& topic, MessageDirection msg,
                        double conditional_range, double eps);

/// Stated P(True News) after the message. Motivated agents draw updating
/// noise from rng; Bayesian and generalized agents are deterministic.
/// grid=false records the raw probability (estimator-validation mode).
double assess(const AgentSpec& agent, const TopicSpec& topic, MessageDirection msg,
              const BeliefDist& belief, RngStream& rng, bool grid = true);

/// Revised median consistent with the stated assessment.
double second_guess(const AgentSpec& agent, const BeliefDist& belief, MessageDirection msg,
                    double assessment);

/// Expected assessment-score gain from seeing the message, for an agent
/// who anticipates its own updating noise but is blind to the motive term.
/// Clamped to [-25, 25].
double wtp_for_message(const AgentSpec& agent, const BeliefDist& belief, const TopicSpec& topic);

/// One (party, updater) cell of the cohort config.
struct PopulationCell {
    Party party = Party::ProDem;
    UpdaterKind updater = UpdaterKind::Motivated;
    int count = 0;
};

/// Parameter distributions shared by all cells.
struct PopulationParams {
    double phi = 0.47;
    MotiveForm motive_form = MotiveForm::Linear;
    std::optional<double> noise_sd;  // separate noise sd for sensitivity runs
    double prior_logit_mean = 0.3228107498104459;  // logit 0.58
    double prior_logit_sd = 0.3;
    double median_bias = 0.4;
    double belief_noise = 0.5;
    double iqr_factor = 1.0;
    double motive_sigma = 0.4;
    double partisanship_alpha = 2.0;
    double partisanship_beta = 2.0;
    double zeta_min = 1.0, zeta_max = 1.0;
    double kappa_min = 1.0, kappa_max = 1.0;
    /// topic id -> |m| center. The defaults put the motive shift
    /// phi * m * R near 1.3 log-odds at the default topic scales.
    std::map<std::string, double> motive_base{
        {"crime", 0.126},     {"mobility", 0.173331}, {"race", 1.15554},
        {"gender", 11.5554},  {"refugees", 0.045},    {"climate", 0.173331},
        {"guns", 0.026},      {"media", 0.288884},    {"party_perf", 0.433327},
        {"own_perf", 0.138665}};
};

struct PopulationConfig {
    std::vector<PopulationCell> cells;
    PopulationParams params;

    int size() const;
    void validate(const std::vector<TopicSpec>& topics) const;
};

/// Draws the cohort. told_prior[i] pins agent i's prior to 1/2; untold
/// agents draw logit-normal priors. Fully determined by the root stream.
std::vector<AgentSpec> make_cohort(const PopulationConfig& config,
                                   const std::vector<TopicSpec>& topics,
                                   const std::vector<bool>& told_prior, const RngStream& root);

const char* to_string(Party p);
const char* to_string(UpdaterKind u);
Party party_from_string(const std::string& s);
UpdaterKind updater_from_string(const std::string& s);

}  // namespace moreas
