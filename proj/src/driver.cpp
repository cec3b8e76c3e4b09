#include "tmc/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tmc/ed.hpp"
#include "tmc/errors.hpp"
#include "tmc/heisenberg.hpp"
#include "tmc/hubbard.hpp"

namespace tmc {

namespace {

template <typename Fn>
auto with_model(const ModelConfig& mc, Fn&& fn) {
    if (mc.kind == ModelKind::heisenberg)
        return fn(HeisenbergXXZ({mc.coupling_j, mc.lattice}));
    return fn(FermiHubbard({mc.hopping_t, mc.onsite_u, mc.n_up, mc.n_down, mc.lattice}));
}

void format_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw ConfigError(path.string() + ": write failed");
}

} // namespace

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<SampleRecord>& records) {
    std::string text = "loop,shift,population,triplet_count,trace,energy_numerator,energy_ratio\n";
    for (const SampleRecord& rec : records) {
        text += std::to_string(rec.loop);
        text += ',';
        format_double(text, rec.shift);
        text += ',';
        format_double(text, rec.population);
        text += ',';
        text += std::to_string(rec.triplet_count);
        text += ',';
        format_double(text, rec.trace);
        text += ',';
        format_double(text, rec.energy_numerator);
        text += ',';
        if (rec.trace != 0.0)
            format_double(text, rec.energy_numerator / rec.trace);
        else
            text += "NA";
        text += '\n';
    }
    write_text(path, text);
}

RunArtifacts run_from_config(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output.directory);

    const auto t0 = std::chrono::steady_clock::now();
    RunResult result = with_model(
        cfg.model, [&](auto model) { return run_simulation(std::move(model), cfg.engine); });
    const auto t1 = std::chrono::steady_clock::now();

    RunArtifacts art;
    art.summary = result.summary;
    art.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    art.series_path = std::filesystem::path(cfg.output.directory) / cfg.output.series_filename;
    art.summary_path = std::filesystem::path(cfg.output.directory) / cfg.output.summary_filename;

    write_series_csv(art.series_path, result.records);

    nlohmann::json summary;
    const RunSummary& s = result.summary;
    if (s.has_energy) {
        summary["e_mean"] = s.e_mean;
        summary["e_error"] = s.e_error;
        summary["s_mean"] = s.s_mean;
        summary["s_error"] = s.s_error;
    } else {
        summary["e_mean"] = nullptr;
        summary["e_error"] = nullptr;
        summary["s_mean"] = nullptr;
        summary["s_error"] = nullptr;
    }
    summary["final_shift"] = s.final_shift;
    summary["final_population"] = s.final_population;
    summary["final_triplet_count"] = s.final_triplet_count;
    summary["loops"] = s.loops;
    summary["wall_time_seconds"] = art.wall_seconds;
    summary["seed"] = cfg.engine.rng_seed;
    summary["config"] = config_to_json(cfg);
    write_text(art.summary_path, summary.dump(2) + "\n");
    return art;
}

std::uint64_t sweep_replica_seed(std::uint64_t base_seed, std::size_t r_index,
                                 int replica) noexcept {
    std::uint64_t s = detail::mix64(base_seed + detail::kGolden);
    s = detail::mix64(s ^ (static_cast<std::uint64_t>(r_index) + 1) * detail::kGolden);
    s = detail::mix64(s ^ (static_cast<std::uint64_t>(replica) + 2) * detail::kGolden);
    return s;
}

SweepResult sweep_r(const RunConfig& base, const std::vector<double>& r_list, int replicas,
                    double fit_r_min, double fit_r_max) {
    if (replicas < 2)
        throw ConfigError("sweep: at least 2 replicas are needed for a variance");

    SweepResult sweep;
    try {
        const EdReport ref = run_ed(base);
        sweep.has_reference = true;
        sweep.reference_energy = ref.energy;
    } catch (const CapacityError&) {
        sweep.has_reference = false; // sector too large; report raw variances
    }

    for (std::size_t ri = 0; ri < r_list.size(); ++ri) {
        SweepPointResult point;
        point.r = r_list[ri];
        for (int rep = 0; rep < replicas; ++rep) {
            RunConfig cfg = base;
            cfg.engine.r = r_list[ri];
            // Hold the population-control loop gain r*xi at the base config's
            // value. With a fixed xi the gain shrinks as r drops and the
            // pre-equilibrium growth at small r (large per-loop multiplier)
            // outruns the controller.
            cfg.engine.damping_xi = base.engine.damping_xi * base.engine.r / r_list[ri];
            cfg.engine.rng_seed = sweep_replica_seed(base.engine.rng_seed, ri, rep);
            try {
                const RunResult result = with_model(cfg.model, [&](auto model) {
                    return run_simulation(std::move(model), cfg.engine);
                });
                if (!result.summary.has_energy)
                    throw EstimateError("sweep: run produced no energy estimate "
                                        "(n_sampling = 0?)");
                point.energies.push_back(result.summary.e_mean);
            } catch (const std::exception& e) {
                point.failures.push_back("r=" + std::to_string(r_list[ri]) + " replica " +
                                         std::to_string(rep) + ": " + e.what());
            }
        }
        if (point.energies.size() >= 2) {
            double mu = 0.0;
            for (double e : point.energies) mu += e;
            mu /= static_cast<double>(point.energies.size());
            double var = 0.0;
            for (double e : point.energies) var += (e - mu) * (e - mu);
            var /= static_cast<double>(point.energies.size() - 1);
            point.has_variance = true;
            point.mean_energy = mu;
            point.variance = var;
            point.rel_variance =
                sweep.has_reference && sweep.reference_energy != 0.0
                    ? var / (sweep.reference_energy * sweep.reference_energy)
                    : var;
        }
        sweep.points.push_back(std::move(point));
    }

    // Log-log least squares of variance vs r inside the fit window.
    std::vector<double> lx, ly;
    for (const auto& p : sweep.points)
        if (p.has_variance && p.variance > 0.0 && p.r >= fit_r_min && p.r <= fit_r_max) {
            lx.push_back(std::log(p.r));
            ly.push_back(std::log(p.variance));
        }
    if (lx.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            mx += lx[k];
            my += ly[k];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            sxx += (lx[k] - mx) * (lx[k] - mx);
            sxy += (lx[k] - mx) * (ly[k] - my);
        }
        if (sxx > 0.0) {
            sweep.has_slope = true;
            sweep.slope = sxy / sxx;
        }
    }

    std::filesystem::create_directories(base.output.directory);
    sweep.table_path = std::filesystem::path(base.output.directory) / "sweep.csv";
    std::string text = "r,replicas_ok,mean_energy,variance,rel_variance\n";
    for (const auto& p : sweep.points) {
        format_double(text, p.r);
        text += ',' + std::to_string(p.energies.size()) + ',';
        if (p.has_variance) {
            format_double(text, p.mean_energy);
            text += ',';
            format_double(text, p.variance);
            text += ',';
            format_double(text, p.rel_variance);
        } else {
            text += "NA,NA,NA";
        }
        text += '\n';
    }
    write_text(sweep.table_path, text);
    return sweep;
}

EdReport run_ed(const RunConfig& cfg) {
    return with_model(cfg.model, [](const auto& model) {
        const GroundState gs = ground_state_energy(model);
        EdReport report;
        report.dimension = model.sector_dimension();
        report.energy = gs.energy;
        report.degeneracy = gs.degeneracy;
        return report;
    });
}

} // namespace tmc
