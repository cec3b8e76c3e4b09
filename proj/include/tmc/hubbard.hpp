#pragma once

// Fermi-Hubbard model at fixed particle numbers,
//
//   H_free = U sum_a n_a^up n_a^down
//   H_int  = -t sum_spin sum_<a,b> c_a^dag c_b + c_b^dag c_a
//
// Fermionic mode ordering is (up block, then down block), within a block by
// site index; hop signs count occupied sites strictly between the endpoints
// within the same spin block. Periodic wrap bonds use the same linear
// ordering rule, not the shorter ring path.

#include <cstdint>
#include <vector>

#include "tmc/lattice.hpp"
#include "tmc/model.hpp"
#include "tmc/rng.hpp"

namespace tmc {

struct HubbardParams {
    double hopping_t = 1.0;
    double onsite_u = 0.0;
    int n_up = 0;
    int n_down = 0;
    LatticeSpec lattice;
};

// Antisymmetrization sign (-1)^m of moving one particle of a single species
// from `from` to `to`: m = occupied sites of occ_word strictly between the
// endpoints. Requires from != to and an occupied source; the Pauli check on
// the target belongs to hop(), not here.
int fermion_hop_sign(std::uint64_t occ_word, int from, int to);

class FermiHubbard {
public:
    using state_type = FermionConfig;

    explicit FermiHubbard(const HubbardParams& params);

    // H_free diagonal: U * (number of doubly occupied sites).
    double diagonal_energy(FermionConfig config) const noexcept;

    // One entry per allowed hop, ordered species (up, then down) x edge
    // index; per edge and species at most one direction is occupied-to-empty.
    // Element = -t * fermion_hop_sign.
    void connections(FermionConfig config, std::vector<Connection<FermionConfig>>& out) const;
    std::vector<Connection<FermionConfig>> connections(FermionConfig config) const;

    int spawn_count(FermionConfig config) const noexcept;
    Connection<FermionConfig> spawn_candidate(FermionConfig config, int index) const;

    // <j|H|i>: diagonal when i = j, -t*sign when j is one nearest-neighbour
    // hop away, 0 otherwise.
    double element(FermionConfig i, FermionConfig j) const;

    // Sum over species of popcount(i_sigma xor j_sigma)/2 (particle
    // displacement lower bound on the hop distance).
    int dynamic_norm(FermionConfig i, FermionConfig j) const;
    int max_norm() const noexcept;

    bool in_sector(FermionConfig config) const noexcept;
    std::uint64_t sector_dimension() const noexcept;

    // Fixed (n_up, n_down) states, up-major ascending.
    std::vector<FermionConfig> sector_states(std::uint64_t enumeration_cap = 10'000'000) const;

    // Up to `cap` states of minimal double occupancy (maximal for attractive
    // U); uniform random subset when the degeneracy exceeds cap.
    std::vector<FermionConfig> free_ground_states(std::size_t cap, CounterRng& rng) const;

    const LatticeSpec& lattice() const noexcept { return params_.lattice; }
    const EdgeList& edges() const noexcept { return edges_; }
    double hopping() const noexcept { return params_.hopping_t; }
    double onsite() const noexcept { return params_.onsite_u; }
    int num_sites() const noexcept { return num_sites_; }

private:
    HubbardParams params_;
    EdgeList edges_;
    int num_sites_ = 0;
    std::vector<std::int16_t> edge_index_; // N*N lookup, -1 when not a bond
};

} // namespace tmc
