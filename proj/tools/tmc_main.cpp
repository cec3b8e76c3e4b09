// Command-line driver: run / sweep-r / ed subcommands around the walker
// engine and the exact-diagonalization reference.
//
// Exit codes: 0 success, 2 configuration problems (parse, schema, capacity),
// 3 runtime aborts (extinction, resolvent, solver, estimator failures).

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tmc/driver.hpp"
#include "tmc/errors.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the JSON run configuration")
        ->required();
    cmd->add_option("--seed", args.seed, "Override engine.rng_seed");
    cmd->add_option("--out", args.out_dir, "Override output.directory");
    cmd->add_option("--threads", args.threads,
                    "Worker threads (reserved; v1 runs single-threaded for "
                    "bit-exact reproducibility)")
        ->check(CLI::PositiveNumber);
}

tmc::RunConfig load(const CommonArgs& args) {
    tmc::RunConfig cfg = tmc::load_config(args.config_path);
    if (args.seed) cfg.engine.rng_seed = *args.seed;
    if (args.out_dir) cfg.output.directory = *args.out_dir;
    return cfg;
}

int do_run(const CommonArgs& args) {
    const tmc::RunConfig cfg = load(args);
    const tmc::RunArtifacts art = tmc::run_from_config(cfg);
    std::printf("series:  %s\n", art.series_path.c_str());
    std::printf("summary: %s\n", art.summary_path.c_str());
    if (art.summary.has_energy) {
        std::printf("E = %.10f +- %.10f (projected)\n", art.summary.e_mean,
                    art.summary.e_error);
        std::printf("S = %.10f +- %.10f (shift)\n", art.summary.s_mean,
                    art.summary.s_error);
    }
    std::printf("final population %.6g in %zu triplets, %.2f s\n",
                art.summary.final_population, art.summary.final_triplet_count,
                art.wall_seconds);
    return 0;
}

int do_sweep(const CommonArgs& args, const std::vector<double>& r_list, int replicas,
             const std::pair<double, double>& window) {
    const tmc::RunConfig cfg = load(args);
    const tmc::SweepResult sweep =
        tmc::sweep_r(cfg, r_list, replicas, window.first, window.second);
    std::printf("%10s %12s %14s %14s %14s\n", "r", "replicas_ok", "mean_E", "variance",
                "rel_variance");
    for (const auto& p : sweep.points) {
        if (p.has_variance)
            std::printf("%10.4g %12zu %14.8g %14.6e %14.6e\n", p.r, p.energies.size(),
                        p.mean_energy, p.variance, p.rel_variance);
        else
            std::printf("%10.4g %12zu %14s %14s %14s\n", p.r, p.energies.size(), "NA", "NA",
                        "NA");
        for (const auto& f : p.failures) std::fprintf(stderr, "[sweep] failed: %s\n", f.c_str());
    }
    if (sweep.has_reference)
        std::printf("reference E0 = %.10f\n", sweep.reference_energy);
    if (sweep.has_slope)
        std::printf("log-log slope over r in [%g, %g]: %.4f\n", window.first, window.second,
                    sweep.slope);
    std::printf("table: %s\n", sweep.table_path.c_str());
    return 0;
}

int do_ed(const CommonArgs& args) {
    const tmc::RunConfig cfg = load(args);
    const tmc::EdReport report = tmc::run_ed(cfg);
    std::printf("sector dimension: %llu\n",
                static_cast<unsigned long long>(report.dimension));
    std::printf("E0 = %.12f\n", report.energy);
    if (report.degeneracy >= 0)
        std::printf("ground degeneracy: %d\n", report.degeneracy);
    else
        std::printf("ground degeneracy: n/a (iterative path)\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-matrix walker engine for lattice ground states"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, ed_args;
    std::vector<double> r_list;
    int replicas = 10;
    std::pair<double, double> window{0.0, 1e300};

    CLI::App* run_cmd = app.add_subcommand("run", "Execute one simulation");
    add_common(run_cmd, run_args);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep-r", "Replica sweep of the energy variance versus r "
                                      "(holds the control gain r*xi at the base "
                                      "config's value)");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--r-list", r_list, "r values to sweep")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--replicas", replicas, "Independent replicas per r (>= 2)");
    sweep_cmd->add_option("--fit-window", window,
                          "r range (min max) for the log-log slope fit");

    CLI::App* ed_cmd =
        app.add_subcommand("ed", "Print sector dimension and exact ground energy");
    add_common(ed_cmd, ed_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return do_run(run_args);
        if (sweep_cmd->parsed()) return do_sweep(sweep_args, r_list, replicas, window);
        if (ed_cmd->parsed()) return do_ed(ed_args);
    } catch (const tmc::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const tmc::CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    }
    return 0;
}
