#include "tmc/lattice.hpp"

#include <algorithm>
#include <string>

namespace tmc {

namespace {

void validate(const LatticeSpec& spec) {
    if (spec.lx < 1 || spec.ly < 1)
        throw ConfigError("lattice: lx and ly must be >= 1");
    if (spec.geometry == Geometry::chain && spec.ly != 1)
        throw ConfigError("lattice: chain requires ly = 1");
    if (spec.geometry == Geometry::triangular && spec.ly < 2)
        throw ConfigError("lattice: triangular requires ly >= 2");
    if (spec.num_sites() > 64)
        throw CapacityError("lattice: " + std::to_string(spec.num_sites()) +
                            " sites exceeds the 64-site cap");
}

} // namespace

const char* geometry_name(Geometry g) noexcept {
    switch (g) {
    case Geometry::chain: return "chain";
    case Geometry::square: return "square";
    case Geometry::triangular: return "triangular";
    }
    return "?";
}

EdgeList build_lattice(const LatticeSpec& spec) {
    validate(spec);

    const int lx = spec.lx, ly = spec.ly;
    EdgeList edges;
    edges.reserve(static_cast<std::size_t>(3 * lx * ly));

    // Neighbour offsets per geometry; triangular adds one fixed diagonal.
    struct Offset { int dx, dy; };
    std::vector<Offset> offsets;
    offsets.push_back({1, 0});
    if (spec.geometry != Geometry::chain) offsets.push_back({0, 1});
    if (spec.geometry == Geometry::triangular) offsets.push_back({1, 1});

    auto push_unique = [&edges](int a, int b) {
        if (a == b) return; // self-bond from a periodic size-1 direction
        Edge e{std::min(a, b), std::max(a, b)};
        if (std::find(edges.begin(), edges.end(), e) == edges.end())
            edges.push_back(e);
    };

    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            for (const auto& off : offsets) {
                int nx = x + off.dx;
                int ny = y + off.dy;
                if (nx >= lx) {
                    if (!spec.periodic_x) continue;
                    nx -= lx;
                }
                if (ny >= ly) {
                    if (!spec.periodic_y) continue;
                    ny -= ly;
                }
                push_unique(spec.site(x, y), spec.site(nx, ny));
            }
        }
    }
    return edges;
}

SpinConfig flip_pair(SpinConfig config, int a, int b) {
    const std::uint64_t mask = (1ULL << a) | (1ULL << b);
    if (((config.bits >> a) & 1u) == ((config.bits >> b) & 1u))
        throw InvalidMoveError("flip_pair: parallel spins on sites " +
                               std::to_string(a) + ", " + std::to_string(b));
    return SpinConfig{config.bits ^ mask};
}

FermionConfig hop(FermionConfig config, Species species, int from, int to) {
    std::uint64_t& word = (species == Species::up) ? config.up_bits : config.down_bits;
    const std::uint64_t from_bit = 1ULL << from;
    const std::uint64_t to_bit = 1ULL << to;
    if (from == to || !(word & from_bit) || (word & to_bit))
        throw InvalidMoveError("hop: move " + std::to_string(from) + " -> " +
                               std::to_string(to) + " is empty-source or Pauli blocked");
    word ^= from_bit | to_bit;
    return config;
}

} // namespace tmc
