#pragma once

#include <string>
#include <vector>

#include "moreas/agents.hpp"
#include "moreas/protocol.hpp"

namespace moreas {

struct ArmFractions {
    double told_prior = 1.0 / 3.0;
    double wtp = 0.5;  // remainder gives a second guess
};

struct SimConfig {
    std::uint64_t seed = 7;
    std::string topics_path;           // used when topics is empty
    std::vector<TopicSpec> topics;     // preloaded topics win over the path
    PopulationConfig cohort;
    ArmFractions arms;
    bool assessment_grid = true;       // false records raw probabilities
    int threads = 0;                   // 0 = hardware concurrency

    void validate() const;
};

/// Parses the simulate config JSON (schema documented in the README).
/// Throws std::invalid_argument with the path and context on bad input.
SimConfig load_sim_config(const std::string& path);

struct SubjectRow {
    int agent_id = 0;
    Party party = Party::Indifferent;
    double partisanship = 0.0;
    UpdaterKind updater = UpdaterKind::Bayesian;
    double phi = 0.0;
    double prior_true = 0.5;
    bool told_prior = false;
    bool wtp_arm = false;
};

struct Dataset {
    std::vector<SubjectRow> subjects;
    std::vector<RoundRecord> rounds;  // sorted by (agent, round)
};

struct CohortDraw {
    std::vector<AgentSpec> agents;
    std::vector<bool> told_prior;
    std::vector<bool> wtp_arm;
};

/// The exact cohort (agents and arm assignments) a simulate() call with
/// this config would use; lets analyses compare estimates against true
/// parameters.
CohortDraw draw_cohort(const SimConfig& config);

/// Runs the cohort through the full protocol. Deterministic given the
/// config seed, independent of thread count.
Dataset simulate(const SimConfig& config);

std::string subjects_csv(const Dataset& ds);
std::string rounds_csv(const Dataset& ds);

/// Writes subjects.csv and rounds.csv; returns the file paths.
std::vector<std::string> emit_csv(const Dataset& ds, const std::string& dir);

/// Rebuilds a dataset from emitted CSVs (or externally supplied files
/// matching the schema).
Dataset load_dataset(const std::string& dir);

}  // namespace moreas
