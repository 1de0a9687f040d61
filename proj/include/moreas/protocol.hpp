#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moreas/rng.hpp"

namespace moreas {

enum class SourceKind { TrueNews, FakeNews };
enum class MessageDirection { GreaterThan, LessThan };
enum class TopicClass { Politicized, Performance, Neutral };

/// One question of the protocol. pro_rep_direction is +1 when a
/// "greater than" message favors the Republican narrative, -1 when it
/// favors the Democratic one, and 0 for neutral and own-performance
/// topics. theta for performance topics is a placeholder replaced by
/// realized cohort values at simulation time.
struct TopicSpec {
    std::string id;
    double theta = 0.0;
    double scale = 1.0;
    int pro_rep_direction = 0;
    bool is_performance = false;
    bool neutral = false;

    TopicClass topic_class() const {
        if (neutral) return TopicClass::Neutral;
        if (is_performance && pro_rep_direction == 0) return TopicClass::Performance;
        return TopicClass::Politicized;
    }

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;
};

std::vector<TopicSpec> load_topics(const std::string& path);

/// One agent x question trajectory as recorded in rounds.csv.
struct RoundRecord {
    int agent_id = 0;
    std::string topic_id;
    int round = 0;
    TopicClass topic_class = TopicClass::Neutral;
    double guess = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double theta = 0.0;
    SourceKind source = SourceKind::TrueNews;
    std::optional<MessageDirection> message;
    std::optional<double> assessment;
    std::optional<double> second_guess;
    std::optional<double> wtp;
    std::optional<bool> bdm_hidden;
    std::optional<double> bdm_bonus;
    double score_guess = 0.0;
    double score_lower = 0.0;
    double score_upper = 0.0;
    std::optional<double> score_assessment;
    std::optional<bool> pro_party;
    std::optional<bool> polarizing;
    std::optional<int> follow;
    bool ci_covers = false;
};

SourceKind draw_source(RngStream& rng);

/// Message truth table: True News reports the side the answer is on,
/// Fake News the opposite. Returns nullopt when guess == theta (the
/// round skips the assessment page).
std::optional<MessageDirection> make_message(SourceKind source, double theta, double guess);

double score_guess(double guess, double theta);

struct BoundsScore {
    double lower = 0.0;
    double upper = 0.0;
};

/// Piecewise linear with slope 3 on the violating side and slope 1 inside.
/// Throws std::invalid_argument when lb > ub.
BoundsScore score_bounds(double lb, double ub, double theta);

/// Quadratic rule; a must be exactly on the 11-point grid.
double score_assessment(double a, SourceKind source);

/// x points -> x/10 percent chance of the bonus.
double points_to_bonus_prob(double mean_points);

struct BdmOutcome {
    bool revealed = false;
    double bonus = 0.0;
    double draw = 0.0;
};

BdmOutcome run_bdm_with_draw(double valuation, double draw);
BdmOutcome run_bdm(double valuation, RngStream& rng);

/// +1 moved with the message, 0 unchanged, -1 moved against.
int classify_follow(double guess, double second_guess, MessageDirection msg);

/// Polarizing news points away from the population mean guess.
/// Ties (guess == population mean) classify as not polarizing.
bool classify_polarizing(double guess, double population_mean, MessageDirection msg);

const char* to_string(SourceKind s);
const char* to_string(MessageDirection m);
const char* to_string(TopicClass c);

}  // namespace moreas
