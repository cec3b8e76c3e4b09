#pragma once

// Stochastic fixed-point iterator on density-matrix walker triplets
// (c, |ket>, <bra|). One loop executes, in order:
//
//   promote initiators -> decompress the ensemble w.r.t. weight factors
//   (the children REPLACE the ensemble; the rest-child coin is how
//   sub-unit-weight triplets die) -> one spawn attempt per unit child ->
//   compress children and spawns -> free-evolution weight update ->
//   measure -> shift update (when population control is armed)
//
// whose per-loop expectation is the exact map rR_free (1 + L_int / r):
// decompression is a martingale in physical weight, so the children carry
// the identity term of (1 + L_int / r) in expectation while the spawns
// carry the interaction term.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "tmc/errors.hpp"
#include "tmc/importance.hpp"
#include "tmc/model.hpp"
#include "tmc/rng.hpp"

namespace tmc {

struct EngineConfig {
    double r = 1.0;                    // inverse time-step, > 0
    double initial_shift = 0.0;
    double damping_xi = 0.1;           // shift damping, > 0
    double target_population = 1000.0; // weight-factor sum that arms shift control
    std::uint64_t shift_update_period = 1;
    double c_init_threshold = 1.0;     // initiator by weight, > 0
    int n_init_threshold = 1;          // initiator by norm, >= 0
    double initial_weight = 1.0;       // per initial triplet, > 0
    std::size_t initial_triplet_count = 1;
    std::uint64_t n_thermalization = 0;
    std::uint64_t n_sampling = 0;
    std::uint64_t rng_seed = 0;
    BiasParams bias{};
    bool initiator_enabled = true;     // off: every triplet spawns as an initiator
    bool shift_control_enabled = true; // off: shift stays at initial_shift
    // Survivor handling. When false (default), the merged classes carry their
    // exact accumulated weights into the next compression and only the
    // spawning copy is decompressed; classes whose weight has decayed below
    // dust_cutoff are purged. When true, the decompressed children replace
    // the ensemble, so every survivor weight is stochastically rounded each
    // loop; population then tracks the stored triplet count closely, at the
    // cost of extra birth/death noise on every occupied pair.
    bool resample_survivors = false;
    double dust_cutoff = 1e-9; // exact-survivor purge threshold on |c|, >= 0
    // Initiator weight test interpretation. Default: the physical class
    // weight |c| is compared against c_init_threshold. When true, the
    // weight factor |c|/bias(norm) is compared instead, i.e. the threshold
    // counts decompression walkers; with resampled survivors and
    // c_init_threshold = 1 this is the classic "more than one walker on
    // the class" criterion, unchanged at kappa = 0.
    bool initiator_walker_units = false;
};

inline void validate(const EngineConfig& cfg) {
    if (!(cfg.r > 0.0)) throw ConfigError("engine: r must be > 0");
    if (!(cfg.damping_xi > 0.0)) throw ConfigError("engine: damping_xi must be > 0");
    if (!(cfg.target_population > 0.0))
        throw ConfigError("engine: target_population must be > 0");
    if (cfg.shift_update_period < 1)
        throw ConfigError("engine: shift_update_period must be >= 1");
    if (!(cfg.c_init_threshold > 0.0))
        throw ConfigError("engine: c_init_threshold must be > 0");
    if (cfg.n_init_threshold < 0)
        throw ConfigError("engine: n_init_threshold must be >= 0");
    if (!(cfg.initial_weight > 0.0)) throw ConfigError("engine: initial_weight must be > 0");
    if (cfg.initial_triplet_count < 1)
        throw ConfigError("engine: initial_triplet_count must be >= 1");
    if (cfg.bias.kappa < 0.0) throw ConfigError("engine: bias kappa must be >= 0");
    if (cfg.dust_cutoff < 0.0) throw ConfigError("engine: dust_cutoff must be >= 0");
}

template <typename State>
struct Triplet {
    double c = 0.0; // physical weight, nonzero for stored triplets
    State ket{};
    State bra{};
    bool is_initiator = false;
};

// Unit-weight-factor child produced by decompression; carries its own RNG
// substream for the subsequent spawn attempt.
template <typename State>
struct DecompressedChild {
    double c = 0.0; // +- bias(norm): |weight factor| = 1
    State ket{};
    State bra{};
    bool parent_initiator = false;
    CounterRng rng{};
};

template <typename State>
struct SpawnedTriplet {
    double c = 0.0;
    State ket{};
    State bra{};
    bool from_initiator = false;
};

struct SampleRecord {
    std::uint64_t loop = 0;
    double shift = 0.0;       // shift used by this loop's free evolution
    double population = 0.0;  // post-compression weight-factor sum
    double trace = 0.0;
    double energy_numerator = 0.0;
    std::size_t triplet_count = 0;
};

namespace detail {

template <typename T>
struct PairLess {
    bool operator()(const T& a, const T& b) const noexcept {
        if (a.ket < b.ket) return true;
        if (b.ket < a.ket) return false;
        return a.bra < b.bra;
    }
};

} // namespace detail

// ---------------------------------------------------------------------------
// Loop stages (free functions so each is testable in isolation)
// ---------------------------------------------------------------------------

template <LatticeModel M>
void promote_initiators(std::vector<Triplet<typename M::state_type>>& ensemble,
                        const M& model, const BiasTable& bias, const EngineConfig& cfg) {
    for (auto& t : ensemble) {
        // Flags are recomputed from scratch every loop; status is never
        // carried over. The weight test defaults to the accumulated physical
        // class weight; initiator_walker_units divides by the bias so the
        // threshold counts decompression walkers instead (see EngineConfig).
        const int n = model.dynamic_norm(t.ket, t.bra);
        const double tested =
            cfg.initiator_walker_units ? std::abs(t.c) / bias(n) : std::abs(t.c);
        t.is_initiator = !cfg.initiator_enabled || n < cfg.n_init_threshold ||
                         tested > cfg.c_init_threshold;
    }
}

// Weight-factor sum, the population used for control and plateau plots.
template <LatticeModel M>
double population(const std::vector<Triplet<typename M::state_type>>& ensemble,
                  const M& model, const BiasTable& bias) {
    double p = 0.0;
    for (const auto& t : ensemble) p += std::abs(t.c) / bias(model.dynamic_norm(t.ket, t.bra));
    return p;
}

// Splits every triplet into floor(|w|) children of physical weight c/|w| plus
// a rest child of the same weight surviving with probability frac(|w|), where
// w = c / bias(norm). Expected total child weight equals c exactly. Each
// child receives substream (seed, loop, running child counter).
template <LatticeModel M>
void decompress(const std::vector<Triplet<typename M::state_type>>& ensemble,
                const M& model, const BiasTable& bias, std::uint64_t seed,
                std::uint64_t loop,
                std::vector<DecompressedChild<typename M::state_type>>& children) {
    children.clear();
    std::uint64_t counter = 0;
    for (const auto& t : ensemble) {
        const double aw = std::abs(t.c) / bias(model.dynamic_norm(t.ket, t.bra));
        if (aw <= 0.0) continue;
        const double floor_aw = std::floor(aw);
        const double child_c = t.c / aw; // sign(c) * bias
        const auto n = static_cast<std::uint64_t>(floor_aw);
        for (std::uint64_t k = 0; k < n; ++k)
            children.push_back({child_c, t.ket, t.bra, t.is_initiator,
                                CounterRng::substream(seed, loop, counter++)});
        const double frac = aw - floor_aw;
        if (frac > 0.0) {
            CounterRng rng = CounterRng::substream(seed, loop, counter++);
            if (rng.uniform01() < frac)
                children.push_back({child_c, t.ket, t.bra, t.is_initiator, rng});
        }
    }
}

// One spawn attempt: pick ket or bra side with probability 1/2, pick one of
// the chosen state's n_s interaction moves uniformly, and emit weight
// -c_child * element * n_s / r on the moved pair.
template <LatticeModel M>
std::optional<SpawnedTriplet<typename M::state_type>>
spawn(const DecompressedChild<typename M::state_type>& child, const M& model, double r) {
    CounterRng rng = child.rng;
    const bool ket_side = rng.below(2) == 0;
    const auto& state = ket_side ? child.ket : child.bra;
    const int n_s = model.spawn_count(state);
    if (n_s == 0) return std::nullopt;
    const auto conn =
        model.spawn_candidate(state, static_cast<int>(rng.below(static_cast<std::uint32_t>(n_s))));
    const double c = -child.c * conn.element * static_cast<double>(n_s) / r;
    SpawnedTriplet<typename M::state_type> s;
    s.c = c;
    s.ket = ket_side ? conn.state : child.ket;
    s.bra = ket_side ? child.bra : conn.state;
    s.from_initiator = child.parent_initiator;
    return s;
}

// Groups survivors and spawns by (ket, bra) and sums weights. A class whose
// only member is a single spawn from a non-initiator is removed; exact
// zero-sum classes are deleted. Survivor input and output are sorted by
// (ket, bra).
template <typename State>
std::vector<Triplet<State>> compress(const std::vector<Triplet<State>>& survivors,
                                     std::vector<SpawnedTriplet<State>>& spawns) {
    std::stable_sort(spawns.begin(), spawns.end(),
                     detail::PairLess<SpawnedTriplet<State>>{});

    std::vector<Triplet<State>> out;
    out.reserve(survivors.size() + spawns.size());
    std::size_t i = 0, j = 0;
    while (i < survivors.size() || j < spawns.size()) {
        // Pick the smallest key among the two fronts.
        bool take_survivor;
        if (i == survivors.size()) {
            take_survivor = false;
        } else if (j == spawns.size()) {
            take_survivor = true;
        } else {
            const auto& s = survivors[i];
            const auto& p = spawns[j];
            take_survivor = s.ket < p.ket || (s.ket == p.ket && !(p.bra < s.bra));
        }
        State ket, bra;
        double sum = 0.0;
        bool has_survivor = false, survivor_initiator = false;
        if (take_survivor) {
            ket = survivors[i].ket;
            bra = survivors[i].bra;
            sum = survivors[i].c;
            has_survivor = true;
            survivor_initiator = survivors[i].is_initiator;
            ++i;
        } else {
            ket = spawns[j].ket;
            bra = spawns[j].bra;
        }
        std::size_t run = 0;
        bool from_initiator = false;
        while (j < spawns.size() && spawns[j].ket == ket && spawns[j].bra == bra) {
            sum += spawns[j].c;
            from_initiator = spawns[j].from_initiator;
            ++run;
            ++j;
        }
        if (!has_survivor && run == 1 && !from_initiator) continue;
        if (sum == 0.0) continue;
        out.push_back({sum, ket, bra, survivor_initiator});
    }
    return out;
}

// Multiplies every weight by r / (r - S + (h_ket + h_bra)/2); states and
// triplet count are untouched.
template <LatticeModel M>
void apply_free_evolution(std::vector<Triplet<typename M::state_type>>& ensemble,
                          const M& model, double r, double shift) {
    for (auto& t : ensemble) {
        const double h_ket = model.diagonal_energy(t.ket);
        const double h_bra = model.diagonal_energy(t.bra);
        const double denom = r - shift + 0.5 * (h_ket + h_bra);
        if (denom <= 0.0)
            throw ResolventError("free evolution: resolvent denominator " +
                                 std::to_string(denom) + " <= 0 at diagonal pair (" +
                                 std::to_string(h_ket) + ", " + std::to_string(h_bra) +
                                 "); r is too small relative to the shifted spectrum");
        t.c *= r / denom;
    }
}

inline double update_shift(double s_prev, double p_now, double p_prev, double r, double xi) {
    if (!(p_now > 0.0) || !(p_prev > 0.0))
        throw ExtinctionError("shift update: nonpositive population (ensemble died)");
    return s_prev - r * xi * std::log(p_now / p_prev);
}

// N_i diagonal triplets on distinct free ground states, drawn uniformly
// without replacement; clamps with a warning when the degeneracy is smaller.
template <LatticeModel M>
std::vector<Triplet<typename M::state_type>> init_ensemble(const M& model,
                                                           const EngineConfig& cfg) {
    CounterRng rng = CounterRng::substream(cfg.rng_seed, ~std::uint64_t{0}, 0);
    auto ground = model.free_ground_states(cfg.initial_triplet_count, rng);
    if (ground.size() < cfg.initial_triplet_count)
        std::fprintf(stderr,
                     "[engine] initial_triplet_count %zu exceeds the %zu distinct free "
                     "ground states; clamping\n",
                     cfg.initial_triplet_count, ground.size());
    std::sort(ground.begin(), ground.end());
    std::vector<Triplet<typename M::state_type>> ensemble;
    ensemble.reserve(ground.size());
    for (const auto& g : ground) ensemble.push_back({cfg.initial_weight, g, g, true});
    return ensemble;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

template <LatticeModel M>
class TripletEngine {
public:
    using State = typename M::state_type;

    TripletEngine(M model, EngineConfig cfg)
        : TripletEngine(std::move(model), cfg, {}) {
        ensemble_ = init_ensemble(model_, cfg_);
    }

    // Explicit-ensemble start (tests, restarts from known matrices).
    TripletEngine(M model, EngineConfig cfg, std::vector<Triplet<State>> initial)
        : model_(std::move(model)), cfg_(cfg),
          bias_(cfg.bias, model_.max_norm()), shift_(cfg.initial_shift),
          ensemble_(std::move(initial)) {
        validate(cfg_);
        std::sort(ensemble_.begin(), ensemble_.end(), detail::PairLess<Triplet<State>>{});
    }

    SampleRecord run_loop() {
        const std::uint64_t loop = loops_done_;
        promote_initiators(ensemble_, model_, bias_, cfg_);
        decompress(ensemble_, model_, bias_, cfg_.rng_seed, loop, children_);
        spawns_.clear();
        for (const auto& child : children_)
            if (auto s = spawn(child, model_, cfg_.r)) spawns_.push_back(*s);
        if (cfg_.resample_survivors) {
            // The children replace the previous ensemble. Children of one
            // parent are consecutive and share (ket, bra), so re-merging them
            // here keeps the survivor list one-triplet-per-pair and sorted,
            // which compress relies on; the net effect of decompress + merge
            // is a stochastic rounding of each |w| that kills sub-unit-weight
            // triplets.
            survivors_.clear();
            for (const auto& child : children_) {
                if (!survivors_.empty() && survivors_.back().ket == child.ket &&
                    survivors_.back().bra == child.bra)
                    survivors_.back().c += child.c;
                else
                    survivors_.push_back(
                        {child.c, child.ket, child.bra, child.parent_initiator});
            }
        } else {
            // The merged classes survive with their exact accumulated weights;
            // only the spawning copy was decompressed. Decayed classes are
            // purged below once they drop under dust_cutoff.
            std::swap(survivors_, ensemble_);
        }
        ensemble_ = compress(survivors_, spawns_);
        if (!cfg_.resample_survivors && cfg_.dust_cutoff > 0.0)
            std::erase_if(ensemble_, [&](const Triplet<State>& t) {
                return std::abs(t.c) < cfg_.dust_cutoff;
            });
        if (ensemble_.empty())
            throw ExtinctionError("engine: ensemble extinct at loop " + std::to_string(loop));
        const double pop = population(ensemble_, model_, bias_);

        apply_free_evolution(ensemble_, model_, cfg_.r, shift_);

        SampleRecord rec;
        rec.loop = loop;
        rec.shift = shift_;
        rec.population = pop;
        rec.triplet_count = ensemble_.size();
        for (const auto& t : ensemble_) {
            if (t.ket == t.bra) rec.trace += t.c;
            rec.energy_numerator += t.c * model_.element(t.ket, t.bra);
        }

        if (cfg_.shift_control_enabled) {
            if (!armed_ && pop >= cfg_.target_population) {
                armed_ = true;
                prev_control_pop_ = pop;
                loops_since_update_ = 0;
            } else if (armed_ && ++loops_since_update_ >= cfg_.shift_update_period) {
                shift_ = update_shift(shift_, pop, prev_control_pop_, cfg_.r, cfg_.damping_xi);
                prev_control_pop_ = pop;
                loops_since_update_ = 0;
            }
        }
        ++loops_done_;
        return rec;
    }

    const std::vector<Triplet<State>>& ensemble() const noexcept { return ensemble_; }
    const M& model() const noexcept { return model_; }
    const EngineConfig& config() const noexcept { return cfg_; }
    double shift() const noexcept { return shift_; }
    bool shift_armed() const noexcept { return armed_; }
    std::uint64_t loops_done() const noexcept { return loops_done_; }
    double current_population() const { return population(ensemble_, model_, bias_); }

private:
    M model_;
    EngineConfig cfg_;
    BiasTable bias_;
    double shift_ = 0.0;
    bool armed_ = false;
    double prev_control_pop_ = 0.0;
    std::uint64_t loops_since_update_ = 0;
    std::uint64_t loops_done_ = 0;
    std::vector<Triplet<State>> ensemble_;
    std::vector<DecompressedChild<State>> children_;
    std::vector<Triplet<State>> survivors_;
    std::vector<SpawnedTriplet<State>> spawns_;
};

} // namespace tmc
