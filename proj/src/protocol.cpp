#include "moreas/protocol.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "moreas/mathutil.hpp"

namespace moreas {

void TopicSpec::validate() const {
    if (id.empty()) throw std::invalid_argument("topic: empty id");
    if (!std::isfinite(theta)) throw std::invalid_argument("topic " + id + ": theta not finite");
    if (!(scale > 0.0)) throw std::invalid_argument("topic " + id + ": scale must be > 0");
    if (pro_rep_direction < -1 || pro_rep_direction > 1)
        throw std::invalid_argument("topic " + id + ": pro_rep_direction must be -1, 0 or +1");
    if (neutral && pro_rep_direction != 0)
        throw std::invalid_argument("topic " + id + ": neutral topics must have direction 0");
    if (neutral && is_performance)
        throw std::invalid_argument("topic " + id + ": performance topics are not neutral");
    // own-performance is the one direction-0 topic that is not neutral
    if (!neutral && !is_performance && pro_rep_direction == 0)
        throw std::invalid_argument("topic " + id + ": direction-0 non-performance topics must be neutral");
}

std::vector<TopicSpec> load_topics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open topic file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("topic file " + path + ": " + e.what());
    }
    if (!j.is_array()) throw std::invalid_argument("topic file " + path + ": expected a JSON array");
    std::vector<TopicSpec> topics;
    for (const auto& t : j) {
        TopicSpec spec;
        spec.id = t.at("id").get<std::string>();
        spec.theta = t.at("theta").get<double>();
        spec.scale = t.at("scale").get<double>();
        spec.pro_rep_direction = t.at("pro_rep_direction").get<int>();
        spec.is_performance = t.at("is_performance").get<bool>();
        spec.neutral = t.at("neutral").get<bool>();
        spec.validate();
        topics.push_back(std::move(spec));
    }
    return topics;
}

SourceKind draw_source(RngStream& rng) {
    return rng.bernoulli(0.5) ? SourceKind::TrueNews : SourceKind::FakeNews;
}

std::optional<MessageDirection> make_message(SourceKind source, double theta, double guess) {
    if (guess == theta) return std::nullopt;
    const bool answer_above = theta > guess;
    const bool says_greater = (source == SourceKind::TrueNews) ? answer_above : !answer_above;
    return says_greater ? MessageDirection::GreaterThan : MessageDirection::LessThan;
}

double score_guess(double guess, double theta) {
    return std::max(100.0 - std::fabs(theta - guess), 0.0);
}

BoundsScore score_bounds(double lb, double ub, double theta) {
    if (lb > ub) throw std::invalid_argument("score_bounds: lower bound exceeds upper bound");
    BoundsScore s;
    s.upper = (theta >= ub) ? std::max(100.0 - 3.0 * (theta - ub), 0.0)
                            : std::max(100.0 - (ub - theta), 0.0);
    s.lower = (theta >= lb) ? std::max(100.0 - (theta - lb), 0.0)
                            : std::max(100.0 - 3.0 * (lb - theta), 0.0);
    return s;
}

double score_assessment(double a, SourceKind source) {
    if (!on_assessment_grid(a))
        throw std::invalid_argument("score_assessment: assessment is not on the 11-point grid");
    if (source == SourceKind::TrueNews) return 100.0 * (1.0 - (1.0 - a) * (1.0 - a));
    return 100.0 * (1.0 - a * a);
}

double points_to_bonus_prob(double mean_points) { return mean_points / 1000.0; }

BdmOutcome run_bdm_with_draw(double valuation, double draw) {
    if (!(valuation >= -25.0 && valuation <= 25.0))
        throw std::invalid_argument("run_bdm: valuation outside [-25, 25]");
    BdmOutcome out;
    out.draw = draw;
    if (draw > valuation) {
        out.revealed = false;
        out.bonus = draw;
    } else {
        out.revealed = true;
        out.bonus = 0.0;
    }
    return out;
}

BdmOutcome run_bdm(double valuation, RngStream& rng) {
    return run_bdm_with_draw(valuation, rng.uniform(-25.0, 25.0));
}

int classify_follow(double guess, double second_guess, MessageDirection msg) {
    if (second_guess == guess) return 0;
    const bool moved_up = second_guess > guess;
    const bool with_message = (msg == MessageDirection::GreaterThan) ? moved_up : !moved_up;
    return with_message ? 1 : -1;
}

bool classify_polarizing(double guess, double population_mean, MessageDirection msg) {
    if (guess == population_mean) return false;
    return (msg == MessageDirection::GreaterThan) ? guess > population_mean
                                                  : guess < population_mean;
}

const char* to_string(SourceKind s) {
    return s == SourceKind::TrueNews ? "true_news" : "fake_news";
}

const char* to_string(MessageDirection m) {
    return m == MessageDirection::GreaterThan ? "greater_than" : "less_than";
}

const char* to_string(TopicClass c) {
    switch (c) {
        case TopicClass::Politicized: return "politicized";
        case TopicClass::Performance: return "performance";
        default: return "neutral";
    }
}

}  // namespace moreas
