#include "moreas/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "moreas/mathutil.hpp"

namespace moreas {

int motive_sign(const AgentSpec& agent, const TopicSpec& topic) {
    if (topic.neutral) return 0;
    if (topic.is_performance && topic.pro_rep_direction == 0) return 1;  // own performance
    if (agent.party == Party::Indifferent) return 0;
    const int party_sign = agent.party == Party::ProRep ? 1 : -1;
    return party_sign * topic.pro_rep_direction;
}

BeliefDist form_belief(const AgentSpec& agent, const TopicSpec& topic, RngStream& rng) {
    const double eps_u = rng.normal(0.0, agent.belief_noise);
    const double bias = agent.median_bias * agent.partisanship * motive_sign(agent, topic);
    const double median = topic.theta + (bias + eps_u) * topic.scale;
    const double iqr = agent.iqr_factor * agent.belief_noise * topic.scale * (2.0 * z75());
    return BeliefDist(median, iqr);
}

double assessment_logit(const AgentSpec& agent, const TopicSpec& topic, MessageDirection msg,
                        double conditional_range, double eps) {
    const double lp = logit(agent.prior_true);
    switch (agent.updater) {
        case UpdaterKind::Bayesian:
            return lp;
        case UpdaterKind::Generalized:
            // kappa multiplies the log likelihood ratio, which is zero here
            return agent.zeta * lp + agent.kappa * 0.0;
        case UpdaterKind::Motivated: {
            const double dir = msg == MessageDirection::GreaterThan ? 1.0 : -1.0;
            const double m = agent.motive_slope(topic.id);
            if (agent.motive_form == MotiveForm::Quadratic) {
                // m(theta) = -|m| (theta* - theta)^2 with theta* at the prior
                // median: the conditional difference is 4 |m| c (median -
                // theta*) with c the half-range, i.e. zero when theta* sits
                // at the median, as it does here.
                const double half_range = 0.5 * conditional_range;
                const double median_minus_target = 0.0;
                const double quad_diff = -std::fabs(m) * 4.0 * half_range * median_minus_target;
                return lp + dir * agent.phi * quad_diff + eps;
            }
            return lp + dir * agent.phi * m * conditional_range + eps;
        }
    }
    return lp;
}

double assess(const AgentSpec& agent, const TopicSpec& topic, MessageDirection msg,
              const BeliefDist& belief, RngStream& rng, bool grid) {
    double eps = 0.0;
    if (agent.updater == UpdaterKind::Motivated && agent.noise_sd() > 0.0)
        eps = rng.normal(0.0, agent.noise_sd());
    const double a = logistic(assessment_logit(agent, topic, msg, belief.conditional_range(), eps));
    return grid ? grid_round(a) : a;
}

double second_guess(const AgentSpec& /*agent*/, const BeliefDist& belief, MessageDirection msg,
                    double assessment) {
    return belief.revise_median(msg, assessment);
}

double wtp_for_message(const AgentSpec& agent, const BeliefDist& /*belief*/,
                       const TopicSpec& /*topic*/) {
    // Subjective expected quadratic score when reporting a truthful
    // posterior a is 100*(1 - a + a^2). Without the message the agent
    // reports its prior. The anticipated posterior is logistic(logit p +
    // eps) with the motive term ignored (the agent is motive-blind), so
    // the premium reduces to the spread that updating noise adds.
    const double p = agent.prior_true;
    const double sd = agent.noise_sd();
    if (agent.updater != UpdaterKind::Motivated || sd <= 0.0) return 0.0;

    const double lp = logit(p);
    auto g = [](double a) { return 1.0 - a + a * a; };
    // Simpson integration of E[g(logistic(lp + eps))] over +-10 sd
    const int n = 2000;  // even
    const double lo = -10.0 * sd, hi = 10.0 * sd;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double dens = std::exp(-0.5 * (x / sd) * (x / sd)) / (sd * std::sqrt(2.0 * M_PI));
        acc += w * dens * g(logistic(lp + x));
    }
    const double expected = acc * h / 3.0;
    const double wtp = 100.0 * (expected - g(p));
    return std::clamp(wtp, -25.0, 25.0);
}

int PopulationConfig::size() const {
    int n = 0;
    for (const auto& c : cells) n += c.count;
    return n;
}

void PopulationConfig::validate(const std::vector<TopicSpec>& topics) const {
    if (cells.empty()) throw std::invalid_argument("cohort: no cells");
    for (const auto& c : cells)
        if (c.count < 0) throw std::invalid_argument("cohort: negative cell count");
    if (size() < 1) throw std::invalid_argument("cohort: size must be >= 1");
    const auto& p = params;
    if (!(p.phi >= 0.0)) throw std::invalid_argument("cohort: phi must be >= 0");
    if (p.noise_sd && !(*p.noise_sd >= 0.0))
        throw std::invalid_argument("cohort: noise_sd must be >= 0");
    if (!(p.belief_noise > 0.0)) throw std::invalid_argument("cohort: belief_noise must be > 0");
    if (!(p.iqr_factor > 0.0)) throw std::invalid_argument("cohort: iqr_factor must be > 0");
    if (!(p.median_bias >= 0.0)) throw std::invalid_argument("cohort: median_bias must be >= 0");
    if (!(p.prior_logit_sd >= 0.0))
        throw std::invalid_argument("cohort: prior_logit_sd must be >= 0");
    if (!(p.partisanship_alpha > 0.0 && p.partisanship_beta > 0.0))
        throw std::invalid_argument("cohort: partisanship beta parameters must be > 0");
    if (p.zeta_max < p.zeta_min || p.kappa_max < p.kappa_min)
        throw std::invalid_argument("cohort: zeta/kappa range inverted");
    for (const auto& t : topics) {
        if (t.topic_class() == TopicClass::Neutral) continue;
        if (!p.motive_base.count(t.id))
            throw std::invalid_argument("cohort: motive_base missing for topic " + t.id);
        if (!(p.motive_base.at(t.id) >= 0.0))
            throw std::invalid_argument("cohort: motive_base must be >= 0 for topic " + t.id);
    }
}

std::vector<AgentSpec> make_cohort(const PopulationConfig& config,
                                   const std::vector<TopicSpec>& topics,
                                   const std::vector<bool>& told_prior, const RngStream& root) {
    config.validate(topics);
    const int n = config.size();
    if (static_cast<int>(told_prior.size()) != n)
        throw std::invalid_argument("make_cohort: told_prior size mismatch");

    const auto& p = config.params;
    std::vector<AgentSpec> agents;
    agents.reserve(n);
    int id = 0;
    for (const auto& cell : config.cells) {
        for (int k = 0; k < cell.count; ++k, ++id) {
            RngStream rng = root.substream("agent_params", static_cast<std::uint64_t>(id));
            AgentSpec a;
            a.id = id;
            a.party = cell.party;
            a.updater = cell.updater;
            a.partisanship = cell.party == Party::Indifferent
                                 ? 0.0
                                 : rng.beta(p.partisanship_alpha, p.partisanship_beta);
            a.motive_form = p.motive_form;
            a.phi = cell.updater == UpdaterKind::Motivated ? p.phi : 0.0;
            a.noise_sd_override = cell.updater == UpdaterKind::Motivated ? p.noise_sd : std::nullopt;
            a.zeta = rng.uniform(p.zeta_min, p.zeta_max);
            a.kappa = rng.uniform(p.kappa_min, p.kappa_max);
            a.prior_true = told_prior[static_cast<std::size_t>(id)]
                               ? 0.5
                               : logistic(rng.normal(p.prior_logit_mean, p.prior_logit_sd));
            a.median_bias = p.median_bias;
            a.belief_noise = p.belief_noise;
            a.iqr_factor = p.iqr_factor;
            for (const auto& t : topics) {
                const int sign = motive_sign(a, t);
                if (sign == 0) {
                    a.motive_slopes[t.id] = 0.0;
                    continue;
                }
                const double base = p.motive_base.at(t.id);
                const double spread =
                    rng.lognormal(-0.5 * p.motive_sigma * p.motive_sigma, p.motive_sigma);
                // own performance is motivated for everyone, so its slope
                // is not partisanship-scaled
                const bool own_perf = t.is_performance && t.pro_rep_direction == 0;
                const double partisan_scale = own_perf ? 1.0 : 2.0 * a.partisanship;
                a.motive_slopes[t.id] = sign * base * partisan_scale * spread;
            }
            agents.push_back(std::move(a));
        }
    }
    return agents;
}

const char* to_string(Party p) {
    switch (p) {
        case Party::ProDem: return "pro_dem";
        case Party::ProRep: return "pro_rep";
        default: return "indifferent";
    }
}

const char* to_string(UpdaterKind u) {
    switch (u) {
        case UpdaterKind::Bayesian: return "bayesian";
        case UpdaterKind::Motivated: return "motivated";
        default: return "generalized";
    }
}

Party party_from_string(const std::string& s) {
    if (s == "pro_dem") return Party::ProDem;
    if (s == "pro_rep") return Party::ProRep;
    if (s == "indifferent") return Party::Indifferent;
    throw std::invalid_argument("unknown party: " + s);
}

UpdaterKind updater_from_string(const std::string& s) {
    if (s == "bayesian") return UpdaterKind::Bayesian;
    if (s == "motivated") return UpdaterKind::Motivated;
    if (s == "generalized") return UpdaterKind::Generalized;
    throw std::invalid_argument("unknown updater: " + s);
}

}  // namespace moreas
