#include "tmc/hubbard.hpp"

#include <bit>
#include <string>

#include "tmc/bits.hpp"
#include "tmc/errors.hpp"

namespace tmc {

int fermion_hop_sign(std::uint64_t occ_word, int from, int to) {
    if (from == to || ((occ_word >> from) & 1u) == 0)
        throw InvalidMoveError("fermion_hop_sign: move " + std::to_string(from) + " -> " +
                               std::to_string(to) + " has no source particle");
    const int crossings = std::popcount(occ_word & between_mask(from, to));
    return (crossings & 1) ? -1 : +1;
}

FermiHubbard::FermiHubbard(const HubbardParams& params)
    : params_(params), edges_(build_lattice(params.lattice)),
      num_sites_(params.lattice.num_sites()) {
    if (params.n_up < 0 || params.n_up > num_sites_ || params.n_down < 0 ||
        params.n_down > num_sites_)
        throw ConfigError("hubbard: particle numbers must lie in [0, " +
                          std::to_string(num_sites_) + "]");
    edge_index_.assign(static_cast<std::size_t>(num_sites_) * num_sites_, -1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        edge_index_[static_cast<std::size_t>(edges_[e].a) * num_sites_ + edges_[e].b] =
            static_cast<std::int16_t>(e);
    }
}

double FermiHubbard::diagonal_energy(FermionConfig config) const noexcept {
    return params_.onsite_u * std::popcount(config.up_bits & config.down_bits);
}

int FermiHubbard::spawn_count(FermionConfig config) const noexcept {
    // Per edge and species: a hop is allowed iff exactly one endpoint is
    // occupied (direction then fixed by which one).
    int count = 0;
    for (const Edge& e : edges_) {
        count += static_cast<int>(((config.up_bits >> e.a) ^ (config.up_bits >> e.b)) & 1u);
        count += static_cast<int>(((config.down_bits >> e.a) ^ (config.down_bits >> e.b)) & 1u);
    }
    return count;
}

namespace {

inline Connection<FermionConfig> make_hop(FermionConfig config, Species species,
                                          const Edge& e, double t) {
    const std::uint64_t word =
        (species == Species::up) ? config.up_bits : config.down_bits;
    const int from = ((word >> e.a) & 1u) ? e.a : e.b;
    const int to = (from == e.a) ? e.b : e.a;
    const int sign = fermion_hop_sign(word, from, to);
    return {hop(config, species, from, to), -t * sign};
}

} // namespace

Connection<FermionConfig> FermiHubbard::spawn_candidate(FermionConfig config, int index) const {
    int seen = 0;
    for (Species sp : {Species::up, Species::down}) {
        const std::uint64_t word = (sp == Species::up) ? config.up_bits : config.down_bits;
        for (const Edge& e : edges_) {
            if ((((word >> e.a) ^ (word >> e.b)) & 1u) == 0) continue;
            if (seen++ == index) return make_hop(config, sp, e, params_.hopping_t);
        }
    }
    throw InvalidMoveError("hubbard: spawn candidate index out of range");
}

void FermiHubbard::connections(FermionConfig config,
                               std::vector<Connection<FermionConfig>>& out) const {
    out.clear();
    for (Species sp : {Species::up, Species::down}) {
        const std::uint64_t word = (sp == Species::up) ? config.up_bits : config.down_bits;
        for (const Edge& e : edges_) {
            if ((((word >> e.a) ^ (word >> e.b)) & 1u) == 0) continue;
            out.push_back(make_hop(config, sp, e, params_.hopping_t));
        }
    }
}

std::vector<Connection<FermionConfig>> FermiHubbard::connections(FermionConfig config) const {
    std::vector<Connection<FermionConfig>> out;
    connections(config, out);
    return out;
}

double FermiHubbard::element(FermionConfig i, FermionConfig j) const {
    if (i == j) return diagonal_energy(i);
    const std::uint64_t xu = i.up_bits ^ j.up_bits;
    const std::uint64_t xd = i.down_bits ^ j.down_bits;
    std::uint64_t moved;
    std::uint64_t word;
    if (xd == 0 && std::popcount(xu) == 2) {
        moved = xu;
        word = i.up_bits;
    } else if (xu == 0 && std::popcount(xd) == 2) {
        moved = xd;
        word = i.down_bits;
    } else {
        return 0.0;
    }
    const int a = std::countr_zero(moved);
    const int b = 63 - std::countl_zero(moved);
    if (edge_index_[static_cast<std::size_t>(a) * num_sites_ + b] < 0) return 0.0;
    const int from = ((word >> a) & 1u) ? a : b;
    const int to = (from == a) ? b : a;
    return -params_.hopping_t * fermion_hop_sign(word, from, to);
}

int FermiHubbard::dynamic_norm(FermionConfig i, FermionConfig j) const {
    const int pu = std::popcount(i.up_bits ^ j.up_bits);
    const int pd = std::popcount(i.down_bits ^ j.down_bits);
    if (pu % 2 != 0 || pd % 2 != 0)
        throw InvalidMoveError("fermion_norm: states are in different particle-number sectors");
    return pu / 2 + pd / 2;
}

int FermiHubbard::max_norm() const noexcept {
    const int up = std::min(params_.n_up, num_sites_ - params_.n_up);
    const int down = std::min(params_.n_down, num_sites_ - params_.n_down);
    return up + down;
}

bool FermiHubbard::in_sector(FermionConfig config) const noexcept {
    if (num_sites_ < 64 &&
        ((config.up_bits >> num_sites_) != 0 || (config.down_bits >> num_sites_) != 0))
        return false;
    return std::popcount(config.up_bits) == params_.n_up &&
           std::popcount(config.down_bits) == params_.n_down;
}

std::uint64_t FermiHubbard::sector_dimension() const noexcept {
    return binomial(num_sites_, params_.n_up) * binomial(num_sites_, params_.n_down);
}

std::vector<FermionConfig> FermiHubbard::sector_states(std::uint64_t enumeration_cap) const {
    const std::uint64_t dim = sector_dimension();
    if (dim > enumeration_cap)
        throw CapacityError("hubbard: sector dimension " + std::to_string(dim) +
                            " exceeds enumeration cap " + std::to_string(enumeration_cap));
    const auto ups = combinations(num_sites_, params_.n_up);
    const auto downs = combinations(num_sites_, params_.n_down);
    std::vector<FermionConfig> states;
    states.reserve(dim);
    for (std::uint64_t u : ups)
        for (std::uint64_t d : downs) states.push_back(FermionConfig{u, d});
    return states;
}

std::vector<FermionConfig> FermiHubbard::free_ground_states(std::size_t cap,
                                                            CounterRng& rng) const {
    const auto states = sector_states();
    if (states.empty()) throw ConfigError("hubbard: empty sector");

    double min_energy = diagonal_energy(states.front());
    for (const FermionConfig& s : states)
        min_energy = std::min(min_energy, diagonal_energy(s));
    const double tol = 1e-9 * (1.0 + std::abs(min_energy));

    std::vector<FermionConfig> ground;
    for (const FermionConfig& s : states)
        if (diagonal_energy(s) <= min_energy + tol) ground.push_back(s);

    if (ground.size() > cap) {
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
