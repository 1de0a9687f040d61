#include <CLI11.hpp>

#include "moreas/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"moreas: motivated-reasoning protocol simulator and estimator"};
    app.set_version_flag("--version", moreas::kToolVersion);
    app.require_subcommand(1);

    moreas::SimulateOptions sim;
    std::uint64_t seed_flag = 0;
    auto* simulate = app.add_subcommand("simulate", "run a cohort through the protocol");
    simulate->add_option("--config", sim.config_path, "simulation config JSON")->required();
    auto* seed_opt = simulate->add_option("--seed", seed_flag, "override the config seed");
    simulate->add_option("--out", sim.out_dir, "output directory")->required();

    moreas::EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "structural MLE and regressions");
    estimate->add_option("--in", est.in_dir, "directory with subjects.csv/rounds.csv")->required();
    estimate->add_option("--out", est.out_dir, "output directory")->required();
    estimate->add_flag("--logit", est.use_logit, "also run regressions on clamped logit outcomes");

    moreas::ReportOptions rep;
    auto* report = app.add_subcommand("report", "figure-series CSVs (and optional SVGs)");
    report->add_option("--in", rep.in_dir, "directory with dataset and estimates")->required();
    report->add_option("--out", rep.out_dir, "output directory")->required();
    report->add_flag("--svg", rep.svg, "emit static SVG charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? moreas::kExitOk : moreas::kExitValidation;
    }

    if (simulate->parsed()) {
        if (seed_opt->count() > 0) sim.seed = seed_flag;
        return moreas::run_simulate(sim);
    }
    if (estimate->parsed()) return moreas::run_estimate(est);
    return moreas::run_report(rep);
}
