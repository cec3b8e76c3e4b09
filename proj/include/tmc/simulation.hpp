#pragma once

// Two-phase driver around TripletEngine: thermalization (shift control arms
// itself when the population first reaches its target), then sampling, with
// summary statistics over the sampling phase.

#include <cstdint>
#include <vector>

#include "tmc/engine.hpp"
#include "tmc/estimators.hpp"

namespace tmc {

struct RunSummary {
    bool has_energy = false;
    double e_mean = 0.0; // projected energy, ratio of means
    double e_error = 0.0;
    double s_mean = 0.0; // shift over the sampling phase
    double s_error = 0.0;
    double final_shift = 0.0;
    double final_population = 0.0;
    std::size_t final_triplet_count = 0;
    std::uint64_t loops = 0;
};

struct RunResult {
    std::vector<SampleRecord> records; // thermalization + sampling, in order
    RunSummary summary;
};

template <LatticeModel M>
RunResult run_simulation(M model, const EngineConfig& cfg) {
    validate(cfg);
    TripletEngine<M> engine(std::move(model), cfg);

    RunResult out;
    const std::uint64_t total = cfg.n_thermalization + cfg.n_sampling;
    out.records.reserve(total);
    for (std::uint64_t loop = 0; loop < total; ++loop)
        out.records.push_back(engine.run_loop());

    RunSummary& s = out.summary;
    s.loops = total;
    s.final_shift = engine.shift();
    if (!out.records.empty()) {
        s.final_population = out.records.back().population;
        s.final_triplet_count = out.records.back().triplet_count;
    }
    if (cfg.n_sampling > 0) {
        const std::vector<SampleRecord> sampling(out.records.end() -
                                                     static_cast<std::ptrdiff_t>(cfg.n_sampling),
                                                 out.records.end());
        const EnergyEstimate est = energy_series_estimate(sampling);
        s.has_energy = true;
        s.e_mean = est.mean;
        s.e_error = est.error;

        std::vector<double> shifts;
        shifts.reserve(sampling.size());
        for (const auto& rec : sampling) shifts.push_back(rec.shift);
        if (shifts.size() >= 64) {
            const BinningResult b = binning_analysis(shifts);
            s.s_mean = b.mean;
            s.s_error = b.binned_error;
        } else {
            double sum = 0.0;
            for (double x : shifts) sum += x;
            s.s_mean = sum / static_cast<double>(shifts.size());
            s.s_error = 0.0;
        }
    }
    return out;
}

} // namespace tmc
