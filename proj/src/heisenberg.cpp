#include "tmc/heisenberg.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "tmc/bits.hpp"
#include "tmc/errors.hpp"

namespace tmc {

HeisenbergXXZ::HeisenbergXXZ(const HeisenbergParams& params)
    : params_(params), edges_(build_lattice(params.lattice)),
      num_sites_(params.lattice.num_sites()) {
    if (params.coupling_j == 0.0)
        throw ConfigError("heisenberg: coupling J must be nonzero");
    if (num_sites_ % 2 != 0)
        throw ConfigError("heisenberg: the Sz = 0 sector needs an even site count, got " +
                          std::to_string(num_sites_));
    edge_index_.assign(static_cast<std::size_t>(num_sites_) * num_sites_, -1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        edge_index_[static_cast<std::size_t>(edges_[e].a) * num_sites_ + edges_[e].b] =
            static_cast<std::int16_t>(e);
    }
}

double HeisenbergXXZ::diagonal_energy(SpinConfig config) const noexcept {
    // sum s_a s_b = (#parallel - #antiparallel) bonds
    int antiparallel = 0;
    for (const Edge& e : edges_)
        antiparallel += static_cast<int>(((config.bits >> e.a) ^ (config.bits >> e.b)) & 1u);
    const int sum = static_cast<int>(edges_.size()) - 2 * antiparallel;
    return 0.5 * params_.coupling_j * sum;
}

int HeisenbergXXZ::spawn_count(SpinConfig config) const noexcept {
    int count = 0;
    for (const Edge& e : edges_)
        count += static_cast<int>(((config.bits >> e.a) ^ (config.bits >> e.b)) & 1u);
    return count;
}

Connection<SpinConfig> HeisenbergXXZ::spawn_candidate(SpinConfig config, int index) const {
    int seen = 0;
    for (const Edge& e : edges_) {
        if ((((config.bits >> e.a) ^ (config.bits >> e.b)) & 1u) == 0) continue;
        if (seen++ == index) {
            const std::uint64_t mask = (1ULL << e.a) | (1ULL << e.b);
            return {SpinConfig{config.bits ^ mask}, 0.5 * params_.coupling_j};
        }
    }
    throw InvalidMoveError("heisenberg: spawn candidate index out of range");
}

void HeisenbergXXZ::connections(SpinConfig config,
                                std::vector<Connection<SpinConfig>>& out) const {
    out.clear();
    const double elem = 0.5 * params_.coupling_j;
    for (const Edge& e : edges_) {
        if ((((config.bits >> e.a) ^ (config.bits >> e.b)) & 1u) == 0) continue;
        const std::uint64_t mask = (1ULL << e.a) | (1ULL << e.b);
        out.push_back({SpinConfig{config.bits ^ mask}, elem});
    }
}

std::vector<Connection<SpinConfig>> HeisenbergXXZ::connections(SpinConfig config) const {
    std::vector<Connection<SpinConfig>> out;
    connections(config, out);
    return out;
}

double HeisenbergXXZ::element(SpinConfig i, SpinConfig j) const {
    if (i == j) return diagonal_energy(i);
    const std::uint64_t x = i.bits ^ j.bits;
    if (std::popcount(x) != 2) return 0.0;
    const int a = std::countr_zero(x);
    const int b = 63 - std::countl_zero(x);
    if (edge_index_[static_cast<std::size_t>(a) * num_sites_ + b] < 0) return 0.0;
    // the differing sites must be antiparallel in i (and hence in j)
    if ((((i.bits >> a) ^ (i.bits >> b)) & 1u) == 0) return 0.0;
    return 0.5 * params_.coupling_j;
}

int HeisenbergXXZ::dynamic_norm(SpinConfig i, SpinConfig j) const {
    const int pc = std::popcount(i.bits ^ j.bits);
    if (pc % 2 != 0)
        throw InvalidMoveError("spin_exchange_norm: states are in different magnetization sectors");
    return pc / 2;
}

bool HeisenbergXXZ::in_sector(SpinConfig config) const noexcept {
    if (num_sites_ < 64 && (config.bits >> num_sites_) != 0) return false;
    return std::popcount(config.bits) == num_sites_ / 2;
}

std::uint64_t HeisenbergXXZ::sector_dimension() const noexcept {
    return binomial(num_sites_, num_sites_ / 2);
}

std::vector<SpinConfig> HeisenbergXXZ::sector_states(std::uint64_t enumeration_cap) const {
    const std::uint64_t dim = sector_dimension();
    if (dim > enumeration_cap)
        throw CapacityError("heisenberg: sector dimension " + std::to_string(dim) +
                            " exceeds enumeration cap " + std::to_string(enumeration_cap));
    std::vector<SpinConfig> states;
    states.reserve(dim);
    for (std::uint64_t word : combinations(num_sites_, num_sites_ / 2))
        states.push_back(SpinConfig{word});
    return states;
}

std::vector<SpinConfig> HeisenbergXXZ::free_ground_states(std::size_t cap, CounterRng& rng) const {
    const auto states = sector_states();
    if (states.empty()) throw ConfigError("heisenberg: empty sector");

    double min_energy = diagonal_energy(states.front());
    for (const SpinConfig& s : states) min_energy = std::min(min_energy, diagonal_energy(s));
    const double tol = 1e-9 * (1.0 + std::abs(min_energy));

    std::vector<SpinConfig> ground;
    for (const SpinConfig& s : states)
        if (diagonal_energy(s) <= min_energy + tol) ground.push_back(s);

    if (ground.size() > cap) {
        // partial Fisher-Yates: uniform subset without replacement
        for (std::size_t i = 0; i < cap; ++i) {
            const std::size_t j =
                i + rng.below(static_cast<std::uint32_t>(ground.size() - i));
            std::swap(ground[i], ground[j]);
        }
        ground.resize(cap);
    }
    return ground;
}

} // namespace tmc
