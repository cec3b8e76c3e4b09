#pragma once

// Observable estimation over triplet ensembles, Tr(A rho) = sum c * a_{ket,bra},
// and binning (blocking) analysis of correlated sample series.

#include <cstddef>
#include <utility>
#include <vector>

#include "tmc/errors.hpp"

namespace tmc {

// Sum of diagonal weights, the stochastic Tr(rho).
template <typename TripletRange>
double trace_estimate(const TripletRange& ensemble) {
    double tr = 0.0;
    for (const auto& t : ensemble)
        if (t.ket == t.bra) tr += t.c;
    return tr;
}

// (numerator, denominator) of Tr(A rho) / Tr(rho) for a generic element
// function a(ket, bra); the two are averaged separately downstream.
template <typename TripletRange, typename ElementFn>
std::pair<double, double> expectation_with(const TripletRange& ensemble, ElementFn&& a) {
    double num = 0.0;
    for (const auto& t : ensemble) num += t.c * a(t.ket, t.bra);
    return {num, trace_estimate(ensemble)};
}

// A = H via the model's element operation.
template <typename TripletRange, typename M>
std::pair<double, double> expectation(const TripletRange& ensemble, const M& model) {
    return expectation_with(ensemble,
                            [&model](const auto& ket, const auto& bra) {
                                return model.element(ket, bra);
                            });
}

struct BinLevel {
    std::size_t bin_size = 1;
    std::size_t num_bins = 0;
    double error = 0.0;
    bool reliable = false; // >= 32 bins at this level
};

struct BinningResult {
    double mean = 0.0;
    double naive_error = 0.0;
    double binned_error = 0.0;
    double correlation_time = 0.0; // integrated autocorrelation, loop units
    std::vector<BinLevel> levels;
};

// Successive pairwise averaging; the quoted error is the maximum standard
// error among levels with at least 32 bins, and the correlation time is
// (binned/naive)^2 / 2. Requires >= 64 samples.
BinningResult binning_analysis(const std::vector<double>& series);

struct EnergyEstimate {
    double mean = 0.0;
    double error = 0.0;
    BinningResult ratio_binning; // of the per-loop ratio where trace != 0
};

// Ratio-of-means energy over sampling records, error from binning of the
// per-loop ratio restricted to nonzero-trace loops.
template <typename Records>
EnergyEstimate energy_series_estimate(const Records& records) {
    double num_sum = 0.0, den_sum = 0.0;
    std::vector<double> ratios;
    std::size_t count = 0;
    for (const auto& rec : records) {
        num_sum += rec.energy_numerator;
        den_sum += rec.trace;
        if (rec.trace != 0.0) ratios.push_back(rec.energy_numerator / rec.trace);
        ++count;
    }
    if (count == 0 || den_sum == 0.0 || ratios.empty())
        throw EstimateError("energy estimate: no nonzero-trace samples");
    EnergyEstimate est;
    est.mean = num_sum / den_sum;
    est.ratio_binning = binning_analysis(ratios);
    est.error = est.ratio_binning.binned_error;
    return est;
}

} // namespace tmc
