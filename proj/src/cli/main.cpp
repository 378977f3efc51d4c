#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Train recurrent-VAE ensembles on pusher-arm trajectories and report decomposed "
                 "predictive uncertainty with task success forecasts."};
    app.require_subcommand(1);

    cli::GenDataOpts gen;
    CLI::App* cg = app.add_subcommand("gen-data", "Simulate trajectories and write a dataset file");
    cg->add_option("--config", gen.config_path, "experiment config JSON")->required();
    cg->add_option("--mode", gen.mode,
                   "override env mode (deterministic|stochastic|ood); resets sigma_a to the mode default");
    cg->add_option("--out", gen.out_path, "output path (default <output_dir>/dataset_<mode>.bin)");

    cli::TrainOpts tr;
    CLI::App* ct = app.add_subcommand("train", "Train an ensemble on a dataset and write checkpoints");
    ct->add_option("--config", tr.config_path, "experiment config JSON")->required();
    ct->add_option("--dataset", tr.dataset_path, "dataset file from gen-data")->required();
    ct->add_option("--members", tr.members, "override ensemble.members");
    ct->add_option("--out", tr.out_dir, "output directory (default <output_dir>/ensemble_<mode>)");

    cli::ReportOpts rp;
    CLI::App* cr = app.add_subcommand(
        "report", "Run the canonical-task conditions and write competency reports with entropy curves");
    cr->add_option("--config", rp.config_path, "experiment config JSON")->required();
    cr->add_option("--manifest-det", rp.manifest_det,
                   "manifest of the deterministic-trained ensemble (deterministic and ood conditions)");
    cr->add_option("--manifest-stoch", rp.manifest_stoch,
                   "manifest of the stochastic-trained ensemble (stochastic condition)");
    cr->add_option("--conditions", rp.conditions,
                   "subset of deterministic,stochastic,ood (default: all three)")
        ->delimiter(',');
    cr->add_option("--out", rp.out_dir, "output directory (default <output_dir>)");
    cr->add_flag("--verbose", rp.verbose, "also print per-member success probabilities");

    cli::ForecastOpts fc;
    CLI::App* cf = app.add_subcommand("forecast", "Forecast one (start, plan, boundary) query");
    cf->add_option("--config", fc.config_path, "experiment config JSON")->required();
    cf->add_option("--manifest", fc.manifest, "ensemble manifest")->required();
    cf->add_option("--s0", fc.s0, "8 comma-separated numbers, or canonical / canonical-ood")->required();
    cf->add_option("--actions", fc.actions_path, "text file, one 'a0 a1' pair per line")->required();
    cf->add_option("--radius", fc.radius, "override success.radius");
    cf->add_option("--deadline", fc.deadline, "override success.deadline");
    cf->add_option("--label", fc.label, "mode label stamped into the report (default 'custom')");
    cf->add_option("--out", fc.out_path, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cg->parsed()) return cli::cmd_gen_data(gen);
        if (ct->parsed()) return cli::cmd_train(tr);
        if (cr->parsed()) return cli::cmd_report(rp);
        if (cf->parsed()) return cli::cmd_forecast(fc);
    } catch (const cli::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
