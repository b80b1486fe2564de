#include "fairsemi/config.hpp"
#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/runner.hpp"
#include "fairsemi/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace fairsemi;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
    auto* config = cmd->add_option("--config", opts.config_path,
                                   "experiment recipe (ini file with [dataset], [method], "
                                   "[learner], [experiment] sections)");
    if (config_required) config->required();
    opts.seed_opt = cmd->add_option(
        "--seed", opts.seed, "master seed (overrides FAIRSEMI_SEED and the config file)");
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
    cmd->add_option("--workers", opts.workers, "concurrent ensemble trainers")
        ->check(CLI::PositiveNumber);
}

/// Flag beats environment beats config file.
void resolve_seed(const CommonOptions& opts, ExperimentConfig& cfg) {
    if (opts.seed_opt->count() > 0) {
        cfg.seed = opts.seed;
    } else if (const char* env = std::getenv("FAIRSEMI_SEED")) {
        cfg.seed = to_u64(env, "FAIRSEMI_SEED");
    }
}

ExperimentConfig load_config(const CommonOptions& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = load_experiment_config(opts.config_path);
    resolve_seed(opts, cfg);
    return cfg;
}

std::filesystem::path ensure_out_dir(const CommonOptions& opts) {
    std::filesystem::path dir = opts.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

void print_aggregate(const std::string& label, const AggregateResult& agg) {
    std::cout << std::left << std::setw(6) << label << std::fixed << std::setprecision(4)
              << "  accuracy " << agg.acc_mean << " +- " << agg.acc_std << "  discrimination "
              << agg.dis_mean << " +- " << agg.dis_std << "  positives";
    for (Scalar count : agg.mean_positives) std::cout << ' ' << std::setprecision(1) << count;
    std::cout << std::defaultfloat << std::setprecision(6) << '\n';
}

int cmd_generate(const CommonOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    const auto* synth = std::get_if<SyntheticSource>(&cfg.source);
    if (synth == nullptr)
        throw ValueError("generate: the config must use a synthetic dataset source");
    Dataset pool = generate_synthetic(synth->spec, cfg.seed);
    if (synth->gpp_keep) pool = make_discriminatory(pool, *synth->gpp_keep, cfg.seed + 1);

    auto path = ensure_out_dir(opts) / "synthetic.csv";
    write_csv(pool, path);
    auto counts = group_counts(pool);
    std::cout << "wrote " << pool.rows() << " rows to " << path.string() << " (G_PP "
              << counts[0] << ", G_UP " << counts[1] << ", G_PN " << counts[2] << ", G_UN "
              << counts[3] << ")\n";
    return 0;
}

int cmd_run(const CommonOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    AggregateResult agg = run_repeated(cfg, opts.workers);
    auto path = ensure_out_dir(opts) / "report.csv";
    write_report_csv({make_report_row(cfg, agg)}, path);
    print_aggregate(method_name(cfg.method), agg);
    std::cout << "report written to " << path.string() << '\n';
    return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::string& axis_text,
              const std::string& values_text) {
    ExperimentConfig cfg = load_config(opts);
    SweepAxis axis = axis_from_name(axis_text);

    std::vector<Scalar> values;
    if (!values_text.empty()) {
        values = to_scalar_list(values_text, "--values");
    } else if (axis == SweepAxis::Rho) {
        values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    } else if (axis == SweepAxis::EnsembleSize) {
        values = {1, 5, 10, 50, 100, 200};
    } else {
        throw ValueError(std::string("sweep: axis ") + axis_name(axis) +
                         " has no default grid; pass --values");
    }

    SweepTable table = sweep(cfg, axis, values, opts.workers);
    auto dir = ensure_out_dir(opts);
    auto csv_path = dir / (std::string("sweep_") + axis_name(axis) + ".csv");
    write_sweep_csv(table, csv_path);

    int failed = 0;
    for (const auto& row : table.rows) {
        if (row.failed) {
            ++failed;
            std::cout << axis_name(axis) << " = " << row.axis_value << "  FAILED: " << row.error
                      << '\n';
        } else {
            print_aggregate(axis_name(axis) + (" = " + std::to_string(row.axis_value)), row.agg);
        }
    }
    std::cout << "table written to " << csv_path.string() << '\n';

    auto svg_path = dir / (std::string("sweep_") + axis_name(axis) + ".svg");
    try {
        write_line_chart(sweep_plot(table, cfg.run_id + ": " + axis_name(axis) + " sweep"),
                         svg_path);
        std::cout << "plot written to " << svg_path.string() << '\n';
    } catch (const ValueError&) {
        std::cerr << "sweep: no successful rows, skipping the plot\n";
    }
    if (failed > 0)
        std::cerr << "sweep: " << failed << " of " << table.rows.size() << " rows failed\n";
    return 0;
}

int cmd_compare(const CommonOptions& opts, const std::string& methods_text) {
    ExperimentConfig cfg = load_config(opts);
    std::vector<Method> methods;
    for (const auto& name : split_list(methods_text)) methods.push_back(method_from_name(name));

    CompareTable table = compare_methods(cfg, methods, opts.workers);
    std::vector<ReportRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        ExperimentConfig variant = cfg;
        variant.method = methods[m];
        rows.push_back(make_report_row(variant, table.rows[m]));
        print_aggregate(method_name(methods[m]), table.rows[m]);
    }
    auto path = ensure_out_dir(opts) / "report.csv";
    write_report_csv(rows, path);
    std::cout << "report written to " << path.string() << '\n';
    return 0;
}

int cmd_decompose(const CommonOptions& opts, const DecompositionOptions& dopts) {
    ExperimentConfig cfg = load_config(opts);
    DecompositionRun run = run_decomposition(cfg, dopts, opts.workers);
    auto dir = ensure_out_dir(opts);
    write_decomposition_csv(run.supervised, dir / "decomposition_supervised.csv");
    write_decomposition_csv(run.semi_supervised, dir / "decomposition_semi_supervised.csv");
    write_pseudo_noise_csv(run.pseudo_noise, dir / "pseudo_noise.csv");
    {
        std::ofstream out(dir / "variance_condition.csv");
        out << "holds,margin\n" << (run.theorem.holds ? 1 : 0) << ',' << std::setprecision(17)
            << run.theorem.margin << '\n';
    }

    auto describe = [](const char* label, const DecompositionReport& report) {
        std::cout << label << ": variance gap " << std::setprecision(4) << std::fixed
                  << report.variance_gap << ", bias gap " << report.bias_gap << ", noise gap "
                  << report.noise_gap << std::defaultfloat << std::setprecision(6) << '\n';
    };
    describe("labeled-only training", run.supervised);
    describe("with pseudo-labels   ", run.semi_supervised);
    std::cout << "pseudo-label noise gap " << std::setprecision(4) << std::fixed
              << run.pseudo_noise.gap << std::defaultfloat << std::setprecision(6) << '\n';
    std::cout << "variance condition " << (run.theorem.holds ? "holds" : "violated")
              << " (margin " << run.theorem.margin << ")\n";
    std::cout << "tables written to " << dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness-enhanced sampling experiments"};
    app.require_subcommand(1);

    CommonOptions generate_opts, run_opts, sweep_opts, compare_opts, decompose_opts;
    std::string axis_text, values_text;
    std::string methods_text = "ORI,US,PS,FS";
    DecompositionOptions dopts;

    auto* generate = app.add_subcommand(
        "generate", "write a synthetic dataset (with optional group thinning) as CSV");
    add_common(generate, generate_opts, false);

    auto* run = app.add_subcommand("run", "run one configuration and write report.csv");
    add_common(run, run_opts, true);

    auto* sweep = app.add_subcommand("sweep", "repeat a run across one swept parameter");
    add_common(sweep, sweep_opts, true);
    sweep->add_option("--axis", axis_text, "swept parameter: rho, K, ns or n")->required();
    sweep->add_option("--values", values_text,
                      "comma-separated grid (defaults exist for rho and K)");

    auto* compare = app.add_subcommand("compare",
                                       "evaluate several methods on identical partitions");
    add_common(compare, compare_opts, true);
    compare->add_option("--methods", methods_text, "comma-separated subset of ORI,US,PS,FS");

    auto* decompose = app.add_subcommand(
        "decompose", "bias/variance/noise split of the labeled-only and augmented pipelines");
    add_common(decompose, decompose_opts, true);
    decompose->add_option("--trials", dopts.trials, "bootstrap models per training pool")
        ->check(CLI::PositiveNumber);
    decompose->add_option("--points", dopts.eval_points, "evaluation points from the test set")
        ->check(CLI::PositiveNumber);
    decompose->add_option("--draws", dopts.label_draws, "label redraws per evaluation point")
        ->check(CLI::PositiveNumber);
    decompose->add_flag("--analytic-noise", dopts.analytic_noise,
                        "use the closed-form label noise instead of redraws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (generate->parsed()) return cmd_generate(generate_opts);
        if (run->parsed()) return cmd_run(run_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, axis_text, values_text);
        if (compare->parsed()) return cmd_compare(compare_opts, methods_text);
        if (decompose->parsed()) return cmd_decompose(decompose_opts, dopts);
    } catch (const fairsemi::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
