#include "tmc/estimators.hpp"

#include <cmath>
#include <string>

namespace tmc {

BinningResult binning_analysis(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 64)
        throw EstimateError("binning: need at least 64 samples, got " + std::to_string(n));

    BinningResult result;
    double sum = 0.0;
    for (double x : series) sum += x;
    result.mean = sum / static_cast<double>(n);

    std::vector<double> data = series;
    std::size_t bin_size = 1;
    while (data.size() >= 2) {
        const std::size_t m = data.size();
        double mu = 0.0;
        for (double x : data) mu += x;
        mu /= static_cast<double>(m);
        double var = 0.0;
        for (double x : data) var += (x - mu) * (x - mu);
        var /= static_cast<double>(m - 1);
        const double err = std::sqrt(var / static_cast<double>(m));
        result.levels.push_back({bin_size, m, err, m >= 32});

        std::vector<double> next;
        next.reserve(m / 2);
        for (std::size_t k = 0; k + 1 < m; k += 2) next.push_back(0.5 * (data[k] + data[k + 1]));
        data = std::move(next);
        bin_size *= 2;
    }

    result.naive_error = result.levels.front().error;
    for (const BinLevel& lvl : result.levels)
        if (lvl.reliable && lvl.error > result.binned_error) result.binned_error = lvl.error;
    result.correlation_time =
        result.naive_error > 0.0
            ? 0.5 * (result.binned_error / result.naive_error) *
                  (result.binned_error / result.naive_error)
            : 0.0;
    return result;
}

} // namespace tmc
