#pragma once

// Spin-1/2 XXZ antiferromagnet in the Pauli-operator convention
//
//   H_free = (J/2) sum_<a,b> sigma^z_a sigma^z_b
//   H_int  = (J/2) sum_<a,b> sigma^+_a sigma^-_b + sigma^-_a sigma^+_b
//
// with sigma^z |±1> = ±|±1> and sigma^± |∓1> = |±1> (no spin-1/2 factors of
// 1/4; flip elements are exactly J/2). The conserved sector is zero total
// magnetization, so the site count must be even.

#include <cstdint>
#include <vector>

#include "tmc/lattice.hpp"
#include "tmc/model.hpp"
#include "tmc/rng.hpp"

namespace tmc {

struct HeisenbergParams {
    double coupling_j = 1.0; // nonzero
    LatticeSpec lattice;
};

class HeisenbergXXZ {
public:
    using state_type = SpinConfig;

    explicit HeisenbergXXZ(const HeisenbergParams& params);

    // H_free diagonal: (J/2) sum over edges of s_a s_b, s = ±1.
    double diagonal_energy(SpinConfig config) const noexcept;

    // All states reached by one interaction move (one entry per antiparallel
    // edge, in edge order); every element equals J/2.
    void connections(SpinConfig config, std::vector<Connection<SpinConfig>>& out) const;
    std::vector<Connection<SpinConfig>> connections(SpinConfig config) const;

    // Hot-path split of connections(): count, then construct only the chosen
    // candidate. Candidate `index` is the index-th antiparallel edge.
    int spawn_count(SpinConfig config) const noexcept;
    Connection<SpinConfig> spawn_candidate(SpinConfig config, int index) const;

    // <j|H|i>: diagonal when i = j, J/2 when j is one flip away along an
    // edge, 0 otherwise.
    double element(SpinConfig i, SpinConfig j) const;

    // Number of local spin exchanges between i and j: popcount(i xor j)/2.
    int dynamic_norm(SpinConfig i, SpinConfig j) const;
    int max_norm() const noexcept { return num_sites_ / 2; }

    bool in_sector(SpinConfig config) const noexcept;
    std::uint64_t sector_dimension() const noexcept;

    // Sz = 0 states in ascending bit-pattern order.
    std::vector<SpinConfig> sector_states(std::uint64_t enumeration_cap = 10'000'000) const;

    // Up to `cap` states of minimal free diagonal energy; a uniform random
    // subset (without replacement) when the degeneracy exceeds cap.
    std::vector<SpinConfig> free_ground_states(std::size_t cap, CounterRng& rng) const;

    const LatticeSpec& lattice() const noexcept { return params_.lattice; }
    const EdgeList& edges() const noexcept { return edges_; }
    double coupling() const noexcept { return params_.coupling_j; }
    int num_sites() const noexcept { return num_sites_; }

private:
    HeisenbergParams params_;
    EdgeList edges_;
    int num_sites_ = 0;
    std::vector<std::int16_t> edge_index_; // N*N lookup, -1 when not a bond
};

} // namespace tmc
