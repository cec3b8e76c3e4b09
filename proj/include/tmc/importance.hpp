#pragma once

// Dynamic norms between bra and ket configurations and the harmonic
// importance-sampling bias b = exp(kappa n^2 / 2) that relates a triplet's
// physical weight c to its population-controlling weight factor w = c / b.

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tmc/errors.hpp"
#include "tmc/lattice.hpp"

namespace tmc {

// Number of local spin exchanges separating two fixed-magnetization
// configurations: popcount(i xor j) / 2.
inline int spin_exchange_norm(SpinConfig i, SpinConfig j) {
    const int pc = std::popcount(i.bits ^ j.bits);
    if (pc % 2 != 0)
        throw InvalidMoveError("spin_exchange_norm: states are in different magnetization sectors");
    return pc / 2;
}

// Per-species XOR half-popcount: a lower bound on the number of hops
// separating two fixed particle-number configurations.
inline int fermion_norm(FermionConfig i, FermionConfig j) {
    const int pu = std::popcount(i.up_bits ^ j.up_bits);
    const int pd = std::popcount(i.down_bits ^ j.down_bits);
    if (pu % 2 != 0 || pd % 2 != 0)
        throw InvalidMoveError("fermion_norm: states are in different particle-number sectors");
    return pu / 2 + pd / 2;
}

struct BiasParams {
    double kappa = 0.0; // >= 0; 0 turns importance sampling off
    bool enabled = true;

    double effective_kappa() const noexcept { return enabled ? kappa : 0.0; }
};

inline double bias(int n, const BiasParams& params) {
    if (params.kappa < 0.0) throw ConfigError("bias: kappa must be >= 0");
    const double k = params.effective_kappa();
    return std::exp(0.5 * k * static_cast<double>(n) * static_cast<double>(n));
}

// Memoized bias values for norms 0 .. max_norm (the only values a model can
// produce).
class BiasTable {
public:
    BiasTable() : values_(1, 1.0) {}

    BiasTable(const BiasParams& params, int max_norm) {
        if (max_norm < 0) max_norm = 0;
        values_.reserve(static_cast<std::size_t>(max_norm) + 1);
        for (int n = 0; n <= max_norm; ++n) values_.push_back(bias(n, params));
    }

    double operator()(int n) const noexcept {
        assert(n >= 0 && static_cast<std::size_t>(n) < values_.size());
        return values_[static_cast<std::size_t>(n)];
    }
    int max_norm() const noexcept { return static_cast<int>(values_.size()) - 1; }

private:
    std::vector<double> values_;
};

} // namespace tmc
