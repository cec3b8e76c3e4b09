#pragma once

// Contract shared by the concrete lattice models. The walker engine, the
// exact-diagonalization oracle and the estimators are all generic over this
// interface.

#include <concepts>
#include <cstdint>
#include <vector>

#include "tmc/rng.hpp"

namespace tmc {

// One off-diagonal Hamiltonian entry reachable from a given state.
template <typename State>
struct Connection {
    State state{};
    double element = 0.0;
};

// clang-format off
template <typename M>
concept LatticeModel = requires(const M m, typename M::state_type s,
                                std::vector<Connection<typename M::state_type>>& buf,
                                CounterRng& rng) {
    { m.diagonal_energy(s) } -> std::convertible_to<double>;
    { m.connections(s, buf) };
    { m.spawn_count(s) } -> std::convertible_to<int>;
    { m.spawn_candidate(s, 0) } -> std::same_as<Connection<typename M::state_type>>;
    { m.element(s, s) } -> std::convertible_to<double>;
    { m.dynamic_norm(s, s) } -> std::convertible_to<int>;
    { m.max_norm() } -> std::convertible_to<int>;
    { m.in_sector(s) } -> std::convertible_to<bool>;
    { m.sector_dimension() } -> std::convertible_to<std::uint64_t>;
    { m.sector_states() } -> std::same_as<std::vector<typename M::state_type>>;
    { m.free_ground_states(std::size_t{1}, rng) } -> std::same_as<std::vector<typename M::state_type>>;
};
// clang-format on

} // namespace tmc
