#pragma once

// Bit-packed spin / fermion configurations on finite lattices and the shared
// lattice geometry (nearest-neighbour edge enumeration).
//
// Site indexing is row-major: site(x, y) = y*lx + x. One machine word per
// spin species caps the system at 64 sites.

#include <compare>
#include <cstdint>
#include <vector>

#include "tmc/errors.hpp"

namespace tmc {

enum class Geometry { chain, square, triangular };

struct LatticeSpec {
    Geometry geometry = Geometry::chain;
    int lx = 1;
    int ly = 1; // 1 for chain
    bool periodic_x = false;
    bool periodic_y = false;

    int num_sites() const noexcept { return lx * ly; }
    int site(int x, int y) const noexcept { return y * lx + x; }
};

// Canonical nearest-neighbour bond, a < b.
struct Edge {
    int a = 0;
    int b = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

// Enumerates the nearest-neighbour edges of the requested geometry in a
// deterministic order (row-major site sweep, fixed offset order). Bonds that
// coincide after canonicalization (periodic directions of size 2) are merged,
// and self-bonds (periodic size-1 directions) are dropped.
//
// Triangular lattices add the (x+1, y+1) diagonal to every plaquette.
EdgeList build_lattice(const LatticeSpec& spec);

const char* geometry_name(Geometry g) noexcept;

// ---------------------------------------------------------------------------
// Configurations
// ---------------------------------------------------------------------------

// Spin-1/2 configuration: bit a set means s_a = +1 (up).
struct SpinConfig {
    std::uint64_t bits = 0;
    friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;
};

// Occupation-number configuration for two fermion species.
struct FermionConfig {
    std::uint64_t up_bits = 0;
    std::uint64_t down_bits = 0;
    friend auto operator<=>(const FermionConfig&, const FermionConfig&) = default;
};

enum class Species { up, down };

inline int spin_sign(SpinConfig c, int site) noexcept {
    return ((c.bits >> site) & 1u) ? +1 : -1;
}

// Exchanges the antiparallel spin pair on sites a, b (toggles both bits).
// Parallel spins are annihilated by the move and raise InvalidMoveError.
SpinConfig flip_pair(SpinConfig config, int a, int b);

// Moves one particle of the given species; the source must be occupied and
// the target empty (Pauli blocking raises InvalidMoveError).
FermionConfig hop(FermionConfig config, Species species, int from, int to);

} // namespace tmc
