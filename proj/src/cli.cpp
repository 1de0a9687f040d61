#include "moreas/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "moreas/csv.hpp"
#include "moreas/inference.hpp"
#include "moreas/simulator.hpp"

namespace moreas {

namespace fs = std::filesystem;

LogLevel log_level() {
    const char* env = std::getenv("MOREAS_LOG");
    if (!env) return LogLevel::Error;
    const std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << '\n';
}

void log_warn(const std::string& msg) { std::cerr << "[warn] " << msg << '\n'; }

void log_error(const std::string& msg) { std::cerr << "[error] " << msg << '\n'; }

std::string hash_inputs(const std::vector<std::string>& paths) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot hash input: " + p);
        char buf[4096];
        while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
            for (std::streamsize i = 0; i < in.gcount(); ++i) {
                h ^= static_cast<unsigned char>(buf[i]);
                h *= 0x100000001b3ULL;
            }
            if (!in) break;
        }
    }
    char out[24];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

namespace {

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_hash, std::optional<std::uint64_t> seed,
                    const std::vector<std::string>& artifacts, double wall_seconds) {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    if (seed) j["seed"] = *seed;
    j["artifacts"] = artifacts;
    j["tool_version"] = kToolVersion;
    j["wall_time_s"] = wall_seconds;
    const fs::path final_path = fs::path(dir) / "manifest.json";
    const fs::path tmp_path = fs::path(dir) / "manifest.json.tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write manifest: " + tmp_path.string());
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("manifest write failed: " + tmp_path.string());
    }
    fs::rename(tmp_path, final_path);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int guarded(const std::string& what, const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::invalid_argument& e) {
        log_error(what + ": " + e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        log_error(what + ": " + e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        log_error(what + ": " + e.what());
        return kExitIo;
    }
}

std::string resolve_topics_path(const std::string& config_path, const std::string& topics) {
    fs::path t(topics);
    if (t.is_absolute() || fs::exists(t)) return t.string();
    // fall back to the config file's directory
    const fs::path beside = fs::path(config_path).parent_path() / t;
    if (fs::exists(beside)) return beside.string();
    return t.string();
}

}  // namespace

int run_simulate(const SimulateOptions& opts) {
    return guarded("simulate", [&] {
        Timer timer;
        SimConfig cfg = load_sim_config(opts.config_path);
        if (opts.seed) cfg.seed = *opts.seed;
        if (cfg.topics_path.empty())
            throw std::invalid_argument("config " + opts.config_path + ": missing topics path");
        cfg.topics_path = resolve_topics_path(opts.config_path, cfg.topics_path);
        if (!fs::exists(cfg.topics_path))
            throw std::invalid_argument("topic file not found: " + cfg.topics_path);
        log_info("simulating cohort of " + std::to_string(cfg.cohort.size()) + " agents, seed " +
                 std::to_string(cfg.seed));
        const Dataset ds = simulate(cfg);
        const auto artifacts = emit_csv(ds, opts.out_dir);
        write_manifest(opts.out_dir, "simulate",
                       hash_inputs({opts.config_path, cfg.topics_path}), cfg.seed, artifacts,
                       timer.seconds());
        log_info("wrote " + std::to_string(ds.rounds.size()) + " round records");
        return kExitOk;
    });
}

namespace {

std::string estimates_csv(const EstimateSet& est) {
    CsvWriter w({"quantity", "agent_id", "topic_id", "value"});
    w.row_start();
    w.field("phi_hat");
    w.field_empty();
    w.field_empty();
    w.field(est.phi_hat);
    w.row_end();
    for (const auto& [id, lp] : est.logit_p_hat) {
        w.row_start();
        w.field("logit_p_hat");
        w.field(id);
        w.field_empty();
        w.field(lp);
        w.row_end();
    }
    for (const auto& m : est.motives) {
        w.row_start();
        w.field("m_hat");
        w.field(m.agent_id);
        w.field(m.topic_id);
        w.field(m.m_hat_winsorized);
        w.row_end();
    }
    return w.str();
}

std::string regressions_csv(const std::vector<RegressionResult>& results) {
    CsvWriter w({"model", "term", "coef", "se", "t", "n", "clusters"});
    for (const auto& r : results) {
        for (std::size_t j = 0; j < r.terms.size(); ++j) {
            w.row_start();
            w.field(r.model);
            w.field(r.terms[j]);
            w.field(r.coef[j]);
            w.field(r.se[j]);
            w.field(r.tstat[j]);
            w.field(r.n);
            w.field(r.n_clusters);
            w.row_end();
        }
    }
    return w.str();
}

std::string coverage_csv(const std::vector<CoverageCell>& cells) {
    CsvWriter w({"topic_class", "group", "n", "coverage", "se"});
    for (const auto& c : cells) {
        w.row_start();
        w.field(c.topic_class);
        w.field(c.group);
        w.field(c.n);
        w.field(c.coverage);
        w.field(c.se);
        w.row_end();
    }
    return w.str();
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

int run_estimate(const EstimateOptions& opts) {
    return guarded("estimate", [&] {
        Timer timer;
        const Dataset ds = load_dataset(opts.in_dir);
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        if (ec) throw std::runtime_error("cannot create directory " + opts.out_dir);

        const EstimateSet est = estimate_structural(ds);
        for (const auto& d : est.dropped) log_warn(d);
        if (est.motive_error) log_warn(*est.motive_error);

        std::vector<RegressionResult> regressions = assessment_regressions(ds, false);
        if (opts.use_logit) {
            auto lr = assessment_regressions(ds, true);
            regressions.insert(regressions.end(), lr.begin(), lr.end());
        }
        bool any_follow = false;
        for (const auto& r : ds.rounds)
            if (r.follow) any_follow = true;
        if (any_follow) {
            auto fr = polarization_regression(ds);
            regressions.insert(regressions.end(), fr.begin(), fr.end());
        } else {
            log_info("no second-guess rows; follow-message regressions skipped");
        }

        const auto coverage = ci_coverage(ds);

        const std::string est_path = (fs::path(opts.out_dir) / "estimates.csv").string();
        const std::string reg_path = (fs::path(opts.out_dir) / "regressions.csv").string();
        const std::string cov_path = (fs::path(opts.out_dir) / "coverage.csv").string();
        save_text(est_path, estimates_csv(est));
        save_text(reg_path, regressions_csv(regressions));
        save_text(cov_path, coverage_csv(coverage));
        write_manifest(opts.out_dir, "estimate",
                       hash_inputs({(fs::path(opts.in_dir) / "subjects.csv").string(),
                                    (fs::path(opts.in_dir) / "rounds.csv").string()}),
                       std::nullopt, {est_path, reg_path, cov_path}, timer.seconds());
        return kExitOk;
    });
}

namespace {

std::string svg_line_chart(const std::vector<double>& xs,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series,
                           const std::string& title);
std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<double>& values, const std::string& title);

std::string cdf_csv(const FosdResult& fosd) {
    CsvWriter w({"assessment", "cdf_pro_party", "cdf_anti_party"});
    for (int k = 0; k <= 10; ++k) {
        w.row_start();
        w.field(k / 10.0);
        w.field(fosd.cdf_a[static_cast<std::size_t>(k)]);
        w.field(fosd.cdf_b[static_cast<std::size_t>(k)]);
        w.row_end();
    }
    return w.str();
}

std::string gap_cells_csv(const std::vector<GapCell>& cells, const char* split_name) {
    CsvWriter w({"direction", split_name, "demeaned_mean", "n"});
    for (const auto& c : cells) {
        w.row_start();
        w.field(c.direction);
        w.field(c.split);
        w.field(c.demeaned_mean);
        w.field(c.n);
        w.row_end();
    }
    return w.str();
}

}  // namespace

int run_report(const ReportOptions& opts) {
    return guarded("report", [&] {
        Timer timer;
        const std::string est_path = (fs::path(opts.in_dir) / "estimates.csv").string();
        if (!fs::exists(est_path))
            throw std::invalid_argument("estimates not found (run estimate first): " + est_path);
        const Dataset ds = load_dataset(opts.in_dir);
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        if (ec) throw std::runtime_error("cannot create directory " + opts.out_dir);

        std::vector<double> pro, anti;
        for (const auto& r : ds.rounds) {
            if (!r.assessment || r.topic_class != TopicClass::Politicized || !r.pro_party) continue;
            (*r.pro_party ? pro : anti).push_back(*r.assessment);
        }
        if (pro.empty() || anti.empty())
            throw std::invalid_argument("report: no Pro/Anti assessments in dataset");
        const FosdResult fosd = fosd_check(pro, anti);
        const GapStats gaps = gap_stats(ds);

        std::vector<std::string> artifacts;
        auto emit = [&](const std::string& name, const std::string& text) {
            const std::string path = (fs::path(opts.out_dir) / name).string();
            save_text(path, text);
            artifacts.push_back(path);
        };
        emit("cdf_pro_anti.csv", cdf_csv(fosd));
        emit("gaps_direction_partisanship.csv", gap_cells_csv(gaps.by_partisanship, "group"));
        emit("gaps_direction_veracity.csv", gap_cells_csv(gaps.by_veracity, "veracity"));

        if (opts.svg) {
            std::vector<double> grid;
            for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
            emit("cdf_pro_anti.svg",
                 svg_line_chart(grid,
                                {{"pro_party", fosd.cdf_a}, {"anti_party", fosd.cdf_b}},
                                "CDF of assessments"));
            std::vector<std::string> labels;
            std::vector<double> values;
            for (const auto& c : gaps.by_partisanship) {
                labels.push_back(c.direction + "/" + c.split);
                values.push_back(c.demeaned_mean);
            }
            emit("gaps_direction_partisanship.svg",
                 svg_bar_chart(labels, values, "Demeaned assessment by direction and partisanship"));
            labels.clear();
            values.clear();
            for (const auto& c : gaps.by_veracity) {
                labels.push_back(c.direction + "/" + c.split);
                values.push_back(c.demeaned_mean);
            }
            emit("gaps_direction_veracity.svg",
                 svg_bar_chart(labels, values, "Demeaned assessment by direction and veracity"));
        }
        write_manifest(opts.out_dir, "report",
                       hash_inputs({(fs::path(opts.in_dir) / "subjects.csv").string(),
                                    (fs::path(opts.in_dir) / "rounds.csv").string(), est_path}),
                       std::nullopt, artifacts, timer.seconds());
        return kExitOk;
    });
}

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string svg_line_chart(const std::vector<double>& xs,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series,
                           const std::string& title) {
    const double w = 640, h = 420, ml = 60, mr = 20, mt = 40, mb = 40;
    const double x0 = xs.front(), x1 = xs.back();
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - y * (h - mt - mb); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
    s << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
    const char* colors[] = {"#1f6fb4", "#c23b22", "#3a923a", "#8a6dae"};
    for (std::size_t i = 0; i < series.size(); ++i) {
        s << "<polyline fill=\"none\" stroke=\"" << colors[i % 4] << "\" stroke-width=\"2\" points=\"";
        for (std::size_t j = 0; j < xs.size(); ++j)
            s << fmt9(px(xs[j])) << ',' << fmt9(py(series[i].second[j])) << ' ';
        s << "\"/>\n";
        s << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 18 * (i + 1) << "\" fill=\""
          << colors[i % 4] << "\" font-size=\"13\">" << series[i].first << "</text>\n";
    }
    for (int k = 0; k <= 10; k += 2) {
        s << "<text x=\"" << fmt9(px(k / 10.0)) << "\" y=\"" << h - mb + 16
          << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt9(k / 10.0) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string svg_bar_chart(const std::vector<std::string>& labels, const std::vector<double>& values,
                          const std::string& title) {
    const double w = 760, h = 420, ml = 60, mr = 20, mt = 40, mb = 120;
    double vmax = 1e-9, vmin = -1e-9;
    for (double v : values) {
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    auto py = [&](double y) { return mt + (vmax - y) / (vmax - vmin) * (h - mt - mb); };
    const double band = (w - ml - mr) / static_cast<double>(values.size());
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
    s << "<line x1=\"" << ml << "\" y1=\"" << fmt9(py(0.0)) << "\" x2=\"" << w - mr << "\" y2=\""
      << fmt9(py(0.0)) << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = ml + band * static_cast<double>(i) + band * 0.15;
        const double top = py(std::max(values[i], 0.0));
        const double bot = py(std::min(values[i], 0.0));
        s << "<rect x=\"" << fmt9(x) << "\" y=\"" << fmt9(top) << "\" width=\"" << fmt9(band * 0.7)
          << "\" height=\"" << fmt9(std::max(bot - top, 0.5)) << "\" fill=\"#1f6fb4\"/>\n";
        s << "<text x=\"" << fmt9(x + band * 0.35) << "\" y=\"" << h - mb + 14
          << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-45 " << fmt9(x + band * 0.35)
          << ' ' << h - mb + 14 << ")\">" << labels[i] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace

}  // namespace moreas
