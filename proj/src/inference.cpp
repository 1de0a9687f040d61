#include "moreas/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Dense>

#include "moreas/beliefs.hpp"
#include "moreas/mathutil.hpp"

namespace moreas {

double clamp_logit(double a) {
    if (a <= 0.0) return logit(0.025);
    if (a >= 1.0) return logit(0.975);
    return logit(a);
}

std::vector<double> winsorize(const std::vector<double>& values, double level) {
    if (values.empty()) throw std::invalid_argument("winsorize: empty input");
    if (!(level >= 0.0 && level < 0.5)) throw std::domain_error("winsorize: level outside [0,0.5)");
    // samples too small to hold one full tail observation pass through
    if (static_cast<double>(values.size()) * level < 1.0) return values;
    const double lo = quantile_type7(values, level);
    const double hi = quantile_type7(values, 1.0 - level);
    std::vector<double> out = values;
    for (double& v : out) v = std::clamp(v, lo, hi);
    return out;
}

std::map<int, double> estimate_logit_priors(const Dataset& ds, std::vector<std::string>* dropped) {
    std::map<int, std::pair<double, int>> acc;  // subject -> (sum, n) over neutral rounds
    std::set<int> assessed_subjects;
    for (const auto& r : ds.rounds) {
        if (!r.assessment) continue;
        assessed_subjects.insert(r.agent_id);
        if (r.topic_class != TopicClass::Neutral) continue;
        auto& a = acc[r.agent_id];
        a.first += clamp_logit(*r.assessment);
        a.second += 1;
    }
    std::map<int, double> priors;
    for (const auto& [id, a] : acc) priors[id] = a.first / a.second;
    if (dropped) {
        for (int id : assessed_subjects)
            if (!priors.count(id))
                dropped->push_back("subject " + std::to_string(id) +
                                   ": no neutral assessments, excluded from estimation");
    }
    return priors;
}

double estimate_phi(const Dataset& ds, const std::map<int, double>& priors) {
    double ss = 0.0;
    long total_rounds = 0;
    for (const auto& r : ds.rounds) {
        if (!r.assessment) continue;
        auto it = priors.find(r.agent_id);
        if (it == priors.end()) continue;
        ++total_rounds;  // Q counts every assessed question, not only neutral ones
        if (r.topic_class != TopicClass::Neutral) continue;
        const double resid = clamp_logit(*r.assessment) - it->second;
        ss += resid * resid;
    }
    if (total_rounds == 0) return 0.0;
    return std::sqrt(ss / static_cast<double>(total_rounds));
}

std::vector<MotiveEstimate> estimate_motives(const Dataset& ds, const std::map<int, double>& priors,
                                             double phi, std::vector<std::string>* dropped) {
    if (!(phi > 0.0)) throw std::invalid_argument("estimate_motives: phi must be > 0");
    std::vector<MotiveEstimate> motives;
    for (const auto& r : ds.rounds) {
        if (!r.assessment || !r.message || r.topic_class != TopicClass::Politicized) continue;
        auto it = priors.find(r.agent_id);
        if (it == priors.end()) continue;
        const double width = r.upper - r.lower;
        if (width <= 0.0) {
            if (dropped)
                dropped->push_back("subject " + std::to_string(r.agent_id) + " topic " + r.topic_id +
                                   ": equal bounds, motive row dropped");
            continue;
        }
        const double cond_range = width * conditional_range_factor();
        const double dir = *r.message == MessageDirection::GreaterThan ? 1.0 : -1.0;
        MotiveEstimate m;
        m.agent_id = r.agent_id;
        m.topic_id = r.topic_id;
        m.m_hat = dir * (clamp_logit(*r.assessment) - it->second) / (phi * cond_range);
        motives.push_back(m);
    }
    // per-topic 5% winsorization for the reporting value
    std::map<std::string, std::vector<std::size_t>> by_topic;
    for (std::size_t i = 0; i < motives.size(); ++i) by_topic[motives[i].topic_id].push_back(i);
    for (const auto& [topic, idx] : by_topic) {
        std::vector<double> vals;
        vals.reserve(idx.size());
        for (auto i : idx) vals.push_back(motives[i].m_hat);
        const auto w = winsorize(vals, 0.05);
        for (std::size_t k = 0; k < idx.size(); ++k) motives[idx[k]].m_hat_winsorized = w[k];
    }
    return motives;
}

EstimateSet estimate_structural(const Dataset& ds) {
    EstimateSet est;
    est.logit_p_hat = estimate_logit_priors(ds, &est.dropped);
    est.phi_hat = estimate_phi(ds, est.logit_p_hat);
    if (!(est.phi_hat > 0.0)) {
        est.motive_error =
            "phi_hat is zero (every neutral assessment equals its subject mean); "
            "motive estimates are undefined";
        return est;
    }
    est.motives = estimate_motives(ds, est.logit_p_hat, est.phi_hat, &est.dropped);
    return est;
}

namespace {

/// Group means subtracted in place.
void within_demean(std::vector<double>& v, const std::vector<int>& group) {
    std::unordered_map<int, std::pair<double, int>> acc;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto& a = acc[group[i]];
        a.first += v[i];
        a.second += 1;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = acc[group[i]];
        v[i] -= a.first / a.second;
    }
}

}  // namespace

RegressionResult ols_fe_clustered(const std::string& model_name, const std::vector<double>& y,
                                  std::vector<std::pair<std::string, std::vector<double>>> cols,
                                  const std::vector<int>& subject, bool absorb_subject,
                                  const std::vector<int>& cluster, std::size_t n_protected) {
    const std::size_t n = y.size();
    if (n == 0) throw std::invalid_argument(model_name + ": empty sample");
    for (const auto& [name, c] : cols)
        if (c.size() != n) throw std::invalid_argument(model_name + ": column " + name + " length mismatch");
    if (subject.size() != n || cluster.size() != n)
        throw std::invalid_argument(model_name + ": id vector length mismatch");

    std::vector<double> yd = y;
    std::vector<std::vector<double>> xd;
    std::vector<std::string> names;
    for (const auto& [name, c] : cols) {
        xd.push_back(c);
        names.push_back(name);
    }
    std::size_t absorbed = 0;
    if (absorb_subject) {
        within_demean(yd, subject);
        for (auto& c : xd) within_demean(c, subject);
        absorbed = std::set<int>(subject.begin(), subject.end()).size();
    } else {
        // explicit intercept when nothing is absorbed
        xd.insert(xd.begin(), std::vector<double>(n, 1.0));
        names.insert(names.begin(), "const");
        if (n_protected != SIZE_MAX) ++n_protected;
    }

    Eigen::VectorXd Y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) Y(static_cast<Eigen::Index>(i)) = yd[i];

    Eigen::MatrixXd X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    for (;;) {
        const auto k = static_cast<Eigen::Index>(xd.size());
        X.resize(static_cast<Eigen::Index>(n), k);
        for (std::size_t i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                X(static_cast<Eigen::Index>(i), j) = xd[static_cast<std::size_t>(j)][i];
        qr.compute(X);
        qr.setThreshold(1e-10);
        if (qr.rank() == k) break;
        // columns permuted past the rank boundary are the dependent ones
        const auto perm = qr.colsPermutation().indices();
        std::vector<std::size_t> dependent;
        for (Eigen::Index j = qr.rank(); j < k; ++j)
            dependent.push_back(static_cast<std::size_t>(perm(j)));
        std::sort(dependent.begin(), dependent.end());
        // redundant dummies are dropped; a collinear protected term is an error
        std::vector<std::size_t> droppable;
        for (auto j : dependent)
            if (j >= n_protected) droppable.push_back(j);
        if (droppable.empty()) {
            std::ostringstream msg;
            msg << model_name << ": rank-deficient design, collinear columns:";
            for (auto j : dependent) msg << ' ' << names[j];
            throw std::invalid_argument(msg.str());
        }
        for (auto it = droppable.rbegin(); it != droppable.rend(); ++it) {
            xd.erase(xd.begin() + static_cast<std::ptrdiff_t>(*it));
            names.erase(names.begin() + static_cast<std::ptrdiff_t>(*it));
        }
    }
    const auto k = static_cast<Eigen::Index>(xd.size());
    const Eigen::VectorXd beta = qr.solve(Y);
    const Eigen::VectorXd resid = Y - X * beta;

    // CR1 cluster-robust covariance
    std::unordered_map<int, Eigen::VectorXd> cluster_scores;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = cluster_scores.find(cluster[i]);
        if (it == cluster_scores.end())
            it = cluster_scores.emplace(cluster[i], Eigen::VectorXd::Zero(k)).first;
        it->second += X.row(static_cast<Eigen::Index>(i)).transpose() * resid(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& kv : cluster_scores) meat += kv.second * kv.second.transpose();
    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::MatrixXd bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const double n_clusters = static_cast<double>(cluster_scores.size());
    const double k_total = static_cast<double>(k) + static_cast<double>(absorbed);
    const double nn = static_cast<double>(n);
    double factor = 1.0;
    if (n_clusters > 1.0 && nn > k_total)
        factor = (n_clusters / (n_clusters - 1.0)) * ((nn - 1.0) / (nn - k_total));
    const Eigen::MatrixXd V = factor * bread * meat * bread;

    RegressionResult res;
    res.model = model_name;
    res.terms = names;
    res.n = static_cast<long>(n);
    res.n_clusters = static_cast<int>(cluster_scores.size());
    for (Eigen::Index j = 0; j < k; ++j) {
        const double b = beta(j);
        const double se = std::sqrt(std::max(V(j, j), 0.0));
        res.coef.push_back(b);
        res.se.push_back(se);
        res.tstat.push_back(se > 0.0 ? b / se
                                     : (std::fabs(b) < 1e-12 ? 0.0
                                                             : std::numeric_limits<double>::infinity()));
    }
    return res;
}

void add_dummies(std::vector<std::pair<std::string, std::vector<double>>>& cols,
                 const std::string& prefix, const std::vector<std::string>& values) {
    std::vector<std::string> levels;
    std::set<std::string> seen;
    for (const auto& v : values)
        if (seen.insert(v).second) levels.push_back(v);
    std::sort(levels.begin(), levels.end());
    for (std::size_t l = 1; l < levels.size(); ++l) {  // drop the first level
        std::vector<double> c(values.size(), 0.0);
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] == levels[l]) c[i] = 1.0;
        cols.emplace_back(prefix + "=" + levels[l], std::move(c));
    }
}

namespace {

struct AnalysisRow {
    int subject = 0;
    std::string topic;
    int round = 0;
    double assessment = 0.0;
    bool pro_party = false;
    bool true_news = false;
    bool polarizing = false;
    double follow = 0.0;
    bool has_follow = false;
};

/// Assessed rounds joined with subject info; neutral rows carry
/// pro_party=false and are filtered by the callers that need Pro/Anti.
std::vector<AnalysisRow> assessed_rows(const Dataset& ds, bool politicized_pro_anti_only) {
    std::vector<AnalysisRow> rows;
    for (const auto& r : ds.rounds) {
        if (!r.assessment) continue;
        if (politicized_pro_anti_only &&
            (r.topic_class != TopicClass::Politicized || !r.pro_party.has_value()))
            continue;
        AnalysisRow a;
        a.subject = r.agent_id;
        a.topic = r.topic_id;
        a.round = r.round;
        a.assessment = *r.assessment;
        a.pro_party = r.pro_party.value_or(false);
        a.true_news = r.source == SourceKind::TrueNews;
        a.polarizing = r.polarizing.value_or(false);
        if (r.follow) {
            a.follow = *r.follow;
            a.has_follow = true;
        }
        rows.push_back(std::move(a));
    }
    return rows;
}

GapEstimate two_group_gap(const std::vector<double>& y, const std::vector<double>& dummy,
                          const std::vector<int>& cluster, const std::string& name) {
    GapEstimate g;
    g.n = static_cast<long>(y.size());
    if (y.empty()) return g;
    const auto res = ols_fe_clustered(name, y, {{"d", dummy}}, cluster, false, cluster);
    g.estimate = res.coef[1];
    g.se = res.se[1];
    return g;
}

}  // namespace

GapStats gap_stats(const Dataset& ds) {
    // subject-level demeaning over every assessed round
    std::unordered_map<int, std::pair<double, int>> subj_mean;
    for (const auto& r : ds.rounds) {
        if (!r.assessment) continue;
        auto& a = subj_mean[r.agent_id];
        a.first += *r.assessment;
        a.second += 1;
    }
    std::unordered_map<int, double> partis;
    std::vector<double> partis_values;
    for (const auto& s : ds.subjects) {
        partis[s.agent_id] = s.partisanship;
        if (s.party != Party::Indifferent) partis_values.push_back(s.partisanship);
    }
    const double partisan_cut =
        partis_values.empty() ? 0.0 : quantile_type7(partis_values, 0.5);

    struct CellAcc {
        double sum = 0.0;
        long n = 0;
    };
    std::map<std::pair<std::string, std::string>, CellAcc> partisan_cells, veracity_cells;
    std::vector<double> pa_y, pa_d;
    std::vector<int> pa_cl;
    std::vector<double> ft_pol_y, ft_pol_d;
    std::vector<int> ft_pol_cl;
    std::vector<double> ft_neu_y, ft_neu_d;
    std::vector<int> ft_neu_cl;

    for (const auto& r : ds.rounds) {
        if (!r.assessment) continue;
        const auto& m = subj_mean[r.agent_id];
        const double demeaned = *r.assessment - m.first / m.second;
        std::string direction;
        if (r.topic_class == TopicClass::Neutral) direction = "neutral";
        else if (r.topic_class == TopicClass::Politicized && r.pro_party)
            direction = *r.pro_party ? "pro_party" : "anti_party";
        else
            continue;  // performance rounds and indifferent subjects stay out of the cells

        const bool partisan = partis[r.agent_id] > partisan_cut;
        auto& pc = partisan_cells[{direction, partisan ? "partisan" : "moderate"}];
        pc.sum += demeaned;
        pc.n += 1;
        auto& vc = veracity_cells[{direction, r.source == SourceKind::TrueNews ? "true_news"
                                                                               : "fake_news"}];
        vc.sum += demeaned;
        vc.n += 1;

        if (direction != "neutral") {
            pa_y.push_back(*r.assessment);
            pa_d.push_back(direction == "pro_party" ? 1.0 : 0.0);
            pa_cl.push_back(r.agent_id);
            ft_pol_y.push_back(*r.assessment);
            ft_pol_d.push_back(r.source == SourceKind::FakeNews ? 1.0 : 0.0);
            ft_pol_cl.push_back(r.agent_id);
        } else {
            ft_neu_y.push_back(*r.assessment);
            ft_neu_d.push_back(r.source == SourceKind::FakeNews ? 1.0 : 0.0);
            ft_neu_cl.push_back(r.agent_id);
        }
    }

    GapStats out;
    for (const auto& [key, acc] : partisan_cells)
        out.by_partisanship.push_back({key.first, key.second, acc.sum / acc.n, acc.n});
    for (const auto& [key, acc] : veracity_cells)
        out.by_veracity.push_back({key.first, key.second, acc.sum / acc.n, acc.n});
    out.pro_minus_anti = two_group_gap(pa_y, pa_d, pa_cl, "gap_pro_anti");
    out.fake_minus_true_politicized = two_group_gap(ft_pol_y, ft_pol_d, ft_pol_cl, "gap_fake_true_pol");
    out.fake_minus_true_neutral = two_group_gap(ft_neu_y, ft_neu_d, ft_neu_cl, "gap_fake_true_neu");
    return out;
}

FosdResult fosd_check(const std::vector<double>& group_a, const std::vector<double>& group_b) {
    if (group_a.empty() || group_b.empty())
        throw std::invalid_argument("fosd_check: both groups must be nonempty");
    FosdResult res;
    res.cdf_a.resize(11);
    res.cdf_b.resize(11);
    for (int k = 0; k <= 10; ++k) {
        const double g = k / 10.0 + 1e-12;
        res.cdf_a[static_cast<std::size_t>(k)] =
            static_cast<double>(std::count_if(group_a.begin(), group_a.end(),
                                              [g](double v) { return v <= g; })) /
            static_cast<double>(group_a.size());
        res.cdf_b[static_cast<std::size_t>(k)] =
            static_cast<double>(std::count_if(group_b.begin(), group_b.end(),
                                              [g](double v) { return v <= g; })) /
            static_cast<double>(group_b.size());
    }
    res.max_violation = 0.0;
    for (int k = 0; k <= 10; ++k)
        res.max_violation = std::max(
            res.max_violation,
            res.cdf_a[static_cast<std::size_t>(k)] - res.cdf_b[static_cast<std::size_t>(k)]);
    res.dominates = res.max_violation <= 1e-12;
    return res;
}

std::vector<CoverageCell> ci_coverage(const Dataset& ds) {
    std::unordered_map<int, double> partis;
    std::unordered_map<int, bool> indifferent;
    std::vector<double> partis_values;
    for (const auto& s : ds.subjects) {
        partis[s.agent_id] = s.partisanship;
        indifferent[s.agent_id] = s.party == Party::Indifferent;
        if (s.party != Party::Indifferent) partis_values.push_back(s.partisanship);
    }
    const double cut = partis_values.empty() ? 0.0 : quantile_type7(partis_values, 0.5);

    std::vector<CoverageCell> out;
    for (const char* cls : {"politicized", "performance", "neutral"}) {
        for (const char* grp : {"all", "partisan", "moderate"}) {
            std::vector<double> y;
            std::vector<int> cl;
            for (const auto& r : ds.rounds) {
                if (std::string(to_string(r.topic_class)) != cls) continue;
                if (indifferent[r.agent_id]) continue;
                const bool partisan = partis[r.agent_id] > cut;
                if (std::string(grp) == "partisan" && !partisan) continue;
                if (std::string(grp) == "moderate" && partisan) continue;
                y.push_back(r.ci_covers ? 1.0 : 0.0);
                cl.push_back(r.agent_id);
            }
            CoverageCell cell;
            cell.topic_class = cls;
            cell.group = grp;
            cell.n = static_cast<long>(y.size());
            if (!y.empty()) {
                // intercept-only regression gives the clustered SE of the mean
                const auto res = ols_fe_clustered("coverage", y, {}, cl, false, cl);
                cell.coverage = res.coef[0];
                cell.se = res.se[0];
            }
            out.push_back(cell);
        }
    }
    return out;
}

namespace {

RegressionResult follow_model(const std::vector<AnalysisRow>& rows, const std::string& name,
                              bool on_polarizing, bool assessment_control) {
    std::vector<double> y;
    std::vector<int> subject;
    std::vector<std::string> topics, rounds, alevels;
    std::vector<double> treat;
    for (const auto& r : rows) {
        y.push_back(r.follow);
        subject.push_back(r.subject);
        topics.push_back(r.topic);
        rounds.push_back(std::to_string(r.round));
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.1f", r.assessment);
        alevels.emplace_back(buf);
        treat.push_back((on_polarizing ? r.polarizing : r.pro_party) ? 1.0 : 0.0);
    }
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    cols.emplace_back(on_polarizing ? "polarizing" : "pro_party", std::move(treat));
    if (assessment_control) add_dummies(cols, "assessment", alevels);
    add_dummies(cols, "topic", topics);
    add_dummies(cols, "round", rounds);
    return ols_fe_clustered(name, y, cols, subject, true, subject, 1);
}

}  // namespace

std::vector<RegressionResult> polarization_regression(const Dataset& ds) {
    std::vector<AnalysisRow> rows;
    for (auto& r : assessed_rows(ds, true))
        if (r.has_follow) rows.push_back(r);
    if (rows.empty()) throw std::invalid_argument("polarization_regression: no second-guess rows");
    std::vector<RegressionResult> out;
    out.push_back(follow_model(rows, "follow_pro_party", false, false));
    out.push_back(follow_model(rows, "follow_polarizing", true, false));
    out.push_back(follow_model(rows, "follow_pro_party_assess_ctrl", false, true));
    out.push_back(follow_model(rows, "follow_polarizing_assess_ctrl", true, true));
    return out;
}

std::vector<RegressionResult> assessment_regressions(const Dataset& ds, bool use_logit) {
    const auto rows = assessed_rows(ds, true);
    if (rows.empty()) throw std::invalid_argument("assessment_regressions: no Pro/Anti rows");
    std::vector<double> y;
    std::vector<int> subject;
    std::vector<std::string> topics, rounds;
    std::vector<double> pro, true_news;
    for (const auto& r : rows) {
        y.push_back(use_logit ? clamp_logit(r.assessment) : r.assessment);
        subject.push_back(r.subject);
        topics.push_back(r.topic);
        rounds.push_back(std::to_string(r.round));
        pro.push_back(r.pro_party ? 1.0 : 0.0);
        true_news.push_back(r.true_news ? 1.0 : 0.0);
    }
    const std::string suffix = use_logit ? "_logit" : "";
    std::vector<RegressionResult> out;
    {
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        cols.emplace_back("pro_party", pro);
        add_dummies(cols, "topic", topics);
        add_dummies(cols, "round", rounds);
        out.push_back(
            ols_fe_clustered("assess_pro_party" + suffix, y, cols, subject, true, subject, 1));
    }
    {
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        cols.emplace_back("true_news", true_news);
        add_dummies(cols, "topic", topics);
        add_dummies(cols, "round", rounds);
        out.push_back(
            ols_fe_clustered("assess_true_news" + suffix, y, cols, subject, true, subject, 1));
    }
    {
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        cols.emplace_back("true_news", true_news);
        cols.emplace_back("pro_party", pro);
        add_dummies(cols, "topic", topics);
        add_dummies(cols, "round", rounds);
        out.push_back(
            ols_fe_clustered("assess_true_news_ctrl" + suffix, y, cols, subject, true, subject, 2));
    }
    return out;
}

}  // namespace moreas
