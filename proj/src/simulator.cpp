#include "moreas/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "moreas/csv.hpp"
#include "moreas/mathutil.hpp"

namespace moreas {

namespace {

constexpr int kCompRoundLow = 2;  // comprehension slot range, kept clear of round 1
// and of the WTP round (the last shuffled slot)

struct RoundPlan {
    std::vector<int> shuffled_topics;  // indices into topics, rounds 1..P+1 minus the gap
    std::vector<int> round_of;         // round index per shuffled topic
    int comprehension_round = 0;
    int wtp_round = 0;
};

}  // namespace

void SimConfig::validate() const {
    if (!(arms.told_prior >= 0.0 && arms.told_prior <= 1.0))
        throw std::invalid_argument("config: told_prior fraction outside [0,1]");
    if (!(arms.wtp >= 0.0 && arms.wtp <= 1.0))
        throw std::invalid_argument("config: wtp fraction outside [0,1]");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }

    SimConfig cfg;
    try {
        cfg.seed = j.value("seed", std::uint64_t{7});
        cfg.topics_path = j.value("topics", std::string{});
        cfg.threads = j.value("threads", 0);
        cfg.assessment_grid = j.value("assessment_grid", true);
        if (j.contains("arms")) {
            const auto& a = j.at("arms");
            cfg.arms.told_prior = a.value("told_prior_fraction", cfg.arms.told_prior);
            cfg.arms.wtp = a.value("wtp_fraction", cfg.arms.wtp);
        }
        const auto& cohort = j.at("cohort");
        for (const auto& c : cohort.at("cells")) {
            PopulationCell cell;
            cell.party = party_from_string(c.at("party").get<std::string>());
            cell.updater = updater_from_string(c.at("updater").get<std::string>());
            cell.count = c.at("count").get<int>();
            cfg.cohort.cells.push_back(cell);
        }
        if (cohort.contains("params")) {
            const auto& p = cohort.at("params");
            auto& q = cfg.cohort.params;
            q.phi = p.value("phi", q.phi);
            if (p.contains("motive_form")) {
                const auto form = p.at("motive_form").get<std::string>();
                if (form == "linear") q.motive_form = MotiveForm::Linear;
                else if (form == "quadratic") q.motive_form = MotiveForm::Quadratic;
                else throw std::invalid_argument("config: unknown motive_form " + form);
            }
            if (p.contains("noise_sd")) q.noise_sd = p.at("noise_sd").get<double>();
            q.prior_logit_mean = p.value("prior_logit_mean", q.prior_logit_mean);
            q.prior_logit_sd = p.value("prior_logit_sd", q.prior_logit_sd);
            q.median_bias = p.value("median_bias", q.median_bias);
            q.belief_noise = p.value("belief_noise", q.belief_noise);
            q.iqr_factor = p.value("iqr_factor", q.iqr_factor);
            q.motive_sigma = p.value("motive_sigma", q.motive_sigma);
            q.partisanship_alpha = p.value("partisanship_alpha", q.partisanship_alpha);
            q.partisanship_beta = p.value("partisanship_beta", q.partisanship_beta);
            q.zeta_min = p.value("zeta_min", q.zeta_min);
            q.zeta_max = p.value("zeta_max", q.zeta_max);
            q.kappa_min = p.value("kappa_min", q.kappa_min);
            q.kappa_max = p.value("kappa_max", q.kappa_max);
            if (p.contains("motive_base"))
                for (const auto& [k, v] : p.at("motive_base").items())
                    q.motive_base[k] = v.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

namespace {

std::vector<bool> assign_arm(int n, double fraction, const RngStream& root, const char* label) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    RngStream rng = root.substream(label);
    rng.shuffle(order);
    const int k = static_cast<int>(std::lround(fraction * n));
    std::vector<bool> flag(static_cast<std::size_t>(n), false);
    for (int i = 0; i < std::min(k, n); ++i) flag[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
    return flag;
}

RoundPlan plan_rounds(const std::vector<TopicSpec>& topics, int agent_id, const RngStream& root) {
    RoundPlan plan;
    for (std::size_t t = 0; t < topics.size(); ++t)
        if (!topics[t].is_performance) plan.shuffled_topics.push_back(static_cast<int>(t));
    RngStream rng = root.substream("round_order", static_cast<std::uint64_t>(agent_id));
    rng.shuffle(plan.shuffled_topics);
    const int p = static_cast<int>(plan.shuffled_topics.size());
    plan.wtp_round = p + 1;  // last shuffled slot (round 12 in the default layout)
    const int comp_hi = std::min(p, 11);  // keep clear of round 1 and the WTP round
    plan.comprehension_round =
        comp_hi >= kCompRoundLow ? static_cast<int>(rng.uniform_int(kCompRoundLow, comp_hi)) : 0;
    int round = 1;
    for (int t : plan.shuffled_topics) {
        if (round == plan.comprehension_round) ++round;
        plan.round_of.push_back(round);
        ++round;
        (void)t;
    }
    return plan;
}

RoundRecord play_round(const AgentSpec& agent, const TopicSpec& topic, int round, bool wtp_here,
                       bool second_guess_arm, bool grid, const RngStream& root) {
    RoundRecord rec;
    rec.agent_id = agent.id;
    rec.topic_id = topic.id;
    rec.round = round;
    rec.topic_class = topic.topic_class();
    rec.theta = topic.theta;

    RngStream belief_rng =
        root.substream("belief", static_cast<std::uint64_t>(agent.id), static_cast<std::uint64_t>(round));
    const BeliefDist belief = form_belief(agent, topic, belief_rng);
    rec.guess = belief.median();
    rec.lower = belief.quantile(0.25);
    rec.upper = belief.quantile(0.75);
    rec.ci_covers = rec.lower <= topic.theta && topic.theta <= rec.upper;
    rec.score_guess = score_guess(rec.guess, topic.theta);
    const BoundsScore bs = score_bounds(rec.lower, rec.upper, topic.theta);
    rec.score_lower = bs.lower;
    rec.score_upper = bs.upper;

    RngStream source_rng =
        root.substream("source", static_cast<std::uint64_t>(agent.id), static_cast<std::uint64_t>(round));
    rec.source = draw_source(source_rng);
    auto message = make_message(rec.source, topic.theta, rec.guess);

    bool delivered = message.has_value();
    if (wtp_here) {
        rec.wtp = wtp_for_message(agent, belief, topic);
        RngStream bdm_rng = root.substream("bdm", static_cast<std::uint64_t>(agent.id));
        const BdmOutcome bdm = run_bdm(*rec.wtp, bdm_rng);
        rec.bdm_hidden = !bdm.revealed;
        rec.bdm_bonus = bdm.bonus;
        if (!bdm.revealed) delivered = false;
    }
    if (!delivered) return rec;

    rec.message = message;
    RngStream assess_rng =
        root.substream("assess", static_cast<std::uint64_t>(agent.id), static_cast<std::uint64_t>(round));
    const double a = assess(agent, topic, *message, belief, assess_rng, grid);
    rec.assessment = a;
    rec.score_assessment = score_assessment(grid ? a : grid_round(a), rec.source);
    const int sign = motive_sign(agent, topic);
    if (sign != 0 && agent.party != Party::Indifferent) {
        const double dir = *message == MessageDirection::GreaterThan ? 1.0 : -1.0;
        rec.pro_party = dir * sign > 0;
    }
    if (second_guess_arm) {
        rec.second_guess = second_guess(agent, belief, *message, a);
        rec.follow = classify_follow(rec.guess, *rec.second_guess, *message);
    }
    return rec;
}

double round_score(const RoundRecord& r) {
    double total = r.score_guess + r.score_lower + r.score_upper;
    double n = 3.0;
    if (r.score_assessment) {
        total += *r.score_assessment;
        n += 1.0;
    }
    return total / n;
}

void run_parallel(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

CohortDraw draw_cohort(const SimConfig& config) {
    config.validate();
    std::vector<TopicSpec> topics =
        config.topics.empty() ? load_topics(config.topics_path) : config.topics;
    const RngStream root(config.seed);
    const int n = config.cohort.size();
    CohortDraw draw;
    draw.told_prior = assign_arm(n, config.arms.told_prior, root, "arm_prior");
    draw.wtp_arm = assign_arm(n, config.arms.wtp, root, "arm_task");
    draw.agents = make_cohort(config.cohort, topics, draw.told_prior, root);
    return draw;
}

Dataset simulate(const SimConfig& config) {
    config.validate();
    std::vector<TopicSpec> topics =
        config.topics.empty() ? load_topics(config.topics_path) : config.topics;
    if (topics.empty()) throw std::invalid_argument("simulate: no topics");
    for (const auto& t : topics) t.validate();

    const RngStream root(config.seed);
    CohortDraw draw = draw_cohort(config);
    const int n = config.cohort.size();
    const auto& told = draw.told_prior;
    const auto& wtp_arm = draw.wtp_arm;
    const auto& agents = draw.agents;

    int own_perf_index = -1, party_perf_index = -1;
    for (std::size_t t = 0; t < topics.size(); ++t) {
        if (!topics[t].is_performance) continue;
        if (topics[t].pro_rep_direction == 0) own_perf_index = static_cast<int>(t);
        else party_perf_index = static_cast<int>(t);
    }

    // Phase A: shuffled rounds, one comprehension gap per agent.
    std::vector<std::vector<RoundRecord>> records(static_cast<std::size_t>(n));
    run_parallel(n, config.threads, [&](int i) {
        const auto& agent = agents[static_cast<std::size_t>(i)];
        const RoundPlan plan = plan_rounds(topics, i, root);
        auto& out = records[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < plan.shuffled_topics.size(); ++k) {
            const auto& topic = topics[static_cast<std::size_t>(plan.shuffled_topics[k])];
            const int round = plan.round_of[k];
            const bool wtp_here = wtp_arm[static_cast<std::size_t>(i)] && round == plan.wtp_round;
            out.push_back(play_round(agent, topic, round, wtp_here,
                                     !wtp_arm[static_cast<std::size_t>(i)],
                                     config.assessment_grid, root));
        }
    });

    // Phase B: realized performance, cohort ranks and party means.
    const int fixed_round_base =
        static_cast<int>(std::count_if(topics.begin(), topics.end(),
                                       [](const TopicSpec& t) { return !t.is_performance; })) +
        2;  // first fixed round index (13 in the default layout)
    std::vector<double> mean_scores(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& recs = records[static_cast<std::size_t>(i)];
        double s = 0.0;
        for (const auto& r : recs) s += round_score(r);
        mean_scores[static_cast<std::size_t>(i)] = recs.empty() ? 0.0 : s / static_cast<double>(recs.size());
    }
    std::vector<double> own_theta(static_cast<std::size_t>(n), 50.0);
    if (n > 1) {
        std::vector<double> sorted = mean_scores;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n; ++i) {
            // count of cohort members with a strictly lower mean score
            const auto below = std::lower_bound(sorted.begin(), sorted.end(),
                                                mean_scores[static_cast<std::size_t>(i)]) -
                               sorted.begin();
            own_theta[static_cast<std::size_t>(i)] =
                100.0 * static_cast<double>(below) / static_cast<double>(n - 1);
        }
    }
    double party_theta = 0.0;
    if (party_perf_index >= 0) {
        // the fixed party question asks for the Democrats' average score
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < n; ++i) {
            if (agents[static_cast<std::size_t>(i)].party != Party::ProDem) continue;
            sum += mean_scores[static_cast<std::size_t>(i)];
            ++count;
        }
        if (count == 0) {
            for (int i = 0; i < n; ++i) sum += mean_scores[static_cast<std::size_t>(i)];
            count = n;
        }
        party_theta = sum / count;
    }

    // Phase C: fixed performance rounds with realized answers.
    run_parallel(n, config.threads, [&](int i) {
        const auto& agent = agents[static_cast<std::size_t>(i)];
        int round = fixed_round_base;
        if (own_perf_index >= 0) {
            TopicSpec t = topics[static_cast<std::size_t>(own_perf_index)];
            t.theta = own_theta[static_cast<std::size_t>(i)];
            records[static_cast<std::size_t>(i)].push_back(
                play_round(agent, t, round, false, !wtp_arm[static_cast<std::size_t>(i)],
                           config.assessment_grid, root));
            ++round;
        }
        if (party_perf_index >= 0) {
            TopicSpec t = topics[static_cast<std::size_t>(party_perf_index)];
            t.theta = party_theta;
            records[static_cast<std::size_t>(i)].push_back(
                play_round(agent, t, round, false, !wtp_arm[static_cast<std::size_t>(i)],
                           config.assessment_grid, root));
        }
    });

    // Phase D: population means and the polarizing flag.
    std::map<std::string, std::pair<double, int>> guess_sums;
    for (const auto& recs : records)
        for (const auto& r : recs) {
            auto& gs = guess_sums[r.topic_id];
            gs.first += r.guess;
            gs.second += 1;
        }
    Dataset ds;
    ds.subjects.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& a = agents[static_cast<std::size_t>(i)];
        SubjectRow s;
        s.agent_id = a.id;
        s.party = a.party;
        s.partisanship = a.partisanship;
        s.updater = a.updater;
        s.phi = a.phi;
        s.prior_true = a.prior_true;
        s.told_prior = told[static_cast<std::size_t>(i)];
        s.wtp_arm = wtp_arm[static_cast<std::size_t>(i)];
        ds.subjects.push_back(s);
    }
    for (auto& recs : records)
        for (auto& r : recs) {
            if (r.message && r.topic_class != TopicClass::Neutral) {
                const auto& gs = guess_sums[r.topic_id];
                r.polarizing = classify_polarizing(r.guess, gs.first / gs.second, *r.message);
            }
            ds.rounds.push_back(std::move(r));
        }
    std::sort(ds.rounds.begin(), ds.rounds.end(), [](const RoundRecord& a, const RoundRecord& b) {
        return a.agent_id != b.agent_id ? a.agent_id < b.agent_id : a.round < b.round;
    });
    return ds;
}

std::string subjects_csv(const Dataset& ds) {
    CsvWriter w({"agent_id", "party", "partisanship", "updater", "phi", "prior_true",
                 "told_prior", "arm"});
    for (const auto& s : ds.subjects) {
        w.row_start();
        w.field(s.agent_id);
        w.field(to_string(s.party));
        w.field(s.partisanship);
        w.field(to_string(s.updater));
        w.field(s.phi);
        w.field(s.prior_true);
        w.field(s.told_prior);
        w.field(s.wtp_arm ? "wtp" : "second_guess");
        w.row_end();
    }
    return w.str();
}

std::string rounds_csv(const Dataset& ds) {
    CsvWriter w({"agent_id", "topic_id",  "round",       "topic_class", "guess",
                 "lower",    "upper",     "theta",       "source",      "message",
                 "assessment", "second_guess", "wtp",    "bdm_hidden",  "bdm_bonus",
                 "score_guess", "score_lower", "score_upper", "score_assessment",
                 "pro_party", "polarizing", "follow",    "ci_covers"});
    for (const auto& r : ds.rounds) {
        w.row_start();
        w.field(r.agent_id);
        w.field(r.topic_id);
        w.field(r.round);
        w.field(to_string(r.topic_class));
        w.field(r.guess);
        w.field(r.lower);
        w.field(r.upper);
        w.field(r.theta);
        w.field(to_string(r.source));
        if (r.message) w.field(to_string(*r.message));
        else w.field_empty();
        w.field(r.assessment);
        w.field(r.second_guess);
        w.field(r.wtp);
        w.field(r.bdm_hidden);
        w.field(r.bdm_bonus);
        w.field(r.score_guess);
        w.field(r.score_lower);
        w.field(r.score_upper);
        w.field(r.score_assessment);
        w.field(r.pro_party);
        w.field(r.polarizing);
        w.field(r.follow);
        w.field(r.ci_covers);
        w.row_end();
    }
    return w.str();
}

std::vector<std::string> emit_csv(const Dataset& ds, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
    const std::string subjects_path = (fs::path(dir) / "subjects.csv").string();
    const std::string rounds_path = (fs::path(dir) / "rounds.csv").string();
    {
        std::ofstream out(subjects_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + subjects_path);
        out << subjects_csv(ds);
        if (!out) throw std::runtime_error("write failed: " + subjects_path);
    }
    {
        std::ofstream out(rounds_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + rounds_path);
        out << rounds_csv(ds);
        if (!out) throw std::runtime_error("write failed: " + rounds_path);
    }
    return {subjects_path, rounds_path};
}

namespace {

SourceKind source_from_string(const std::string& s) {
    if (s == "true_news") return SourceKind::TrueNews;
    if (s == "fake_news") return SourceKind::FakeNews;
    throw std::invalid_argument("unknown source: " + s);
}

MessageDirection message_from_string(const std::string& s) {
    if (s == "greater_than") return MessageDirection::GreaterThan;
    if (s == "less_than") return MessageDirection::LessThan;
    throw std::invalid_argument("unknown message: " + s);
}

TopicClass class_from_string(const std::string& s) {
    if (s == "politicized") return TopicClass::Politicized;
    if (s == "performance") return TopicClass::Performance;
    if (s == "neutral") return TopicClass::Neutral;
    throw std::invalid_argument("unknown topic class: " + s);
}

}  // namespace

Dataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    const auto subjects_path = (fs::path(dir) / "subjects.csv").string();
    const auto rounds_path = (fs::path(dir) / "rounds.csv").string();
    const CsvTable st = CsvTable::load(subjects_path);
    st.require_columns({"agent_id", "party", "partisanship", "updater", "phi", "prior_true",
                        "told_prior", "arm"});
    const CsvTable rt = CsvTable::load(rounds_path);
    rt.require_columns({"agent_id", "topic_id", "round", "topic_class", "guess", "lower", "upper",
                        "theta", "source", "message", "assessment", "second_guess", "wtp",
                        "bdm_hidden", "bdm_bonus", "score_guess", "score_lower", "score_upper",
                        "score_assessment", "pro_party", "polarizing", "follow", "ci_covers"});

    Dataset ds;
    for (std::size_t r = 0; r < st.rows(); ++r) {
        SubjectRow s;
        s.agent_id = static_cast<int>(st.number(r, "agent_id"));
        s.party = party_from_string(st.cell(r, "party"));
        s.partisanship = st.number(r, "partisanship");
        s.updater = updater_from_string(st.cell(r, "updater"));
        s.phi = st.number(r, "phi");
        s.prior_true = st.number(r, "prior_true");
        s.told_prior = st.number(r, "told_prior") != 0.0;
        s.wtp_arm = st.cell(r, "arm") == "wtp";
        ds.subjects.push_back(s);
    }
    for (std::size_t r = 0; r < rt.rows(); ++r) {
        RoundRecord rec;
        rec.agent_id = static_cast<int>(rt.number(r, "agent_id"));
        rec.topic_id = rt.cell(r, "topic_id");
        rec.round = static_cast<int>(rt.number(r, "round"));
        rec.topic_class = class_from_string(rt.cell(r, "topic_class"));
        rec.guess = rt.number(r, "guess");
        rec.lower = rt.number(r, "lower");
        rec.upper = rt.number(r, "upper");
        rec.theta = rt.number(r, "theta");
        rec.source = source_from_string(rt.cell(r, "source"));
        if (!rt.empty_cell(r, "message")) rec.message = message_from_string(rt.cell(r, "message"));
        rec.assessment = rt.opt_number(r, "assessment");
        rec.second_guess = rt.opt_number(r, "second_guess");
        rec.wtp = rt.opt_number(r, "wtp");
        if (auto v = rt.opt_number(r, "bdm_hidden")) rec.bdm_hidden = *v != 0.0;
        rec.bdm_bonus = rt.opt_number(r, "bdm_bonus");
        rec.score_guess = rt.number(r, "score_guess");
        rec.score_lower = rt.number(r, "score_lower");
        rec.score_upper = rt.number(r, "score_upper");
        rec.score_assessment = rt.opt_number(r, "score_assessment");
        if (auto v = rt.opt_number(r, "pro_party")) rec.pro_party = *v != 0.0;
        if (auto v = rt.opt_number(r, "polarizing")) rec.polarizing = *v != 0.0;
        if (auto v = rt.opt_number(r, "follow")) rec.follow = static_cast<int>(*v);
        rec.ci_covers = rt.number(r, "ci_covers") != 0.0;
        ds.rounds.push_back(std::move(rec));
    }
    return ds;
}

}  // namespace moreas
