#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "tmc/ed.hpp"
#include "tmc/engine.hpp"
#include "tmc/errors.hpp"
#include "tmc/estimators.hpp"
#include "tmc/heisenberg.hpp"
#include "tmc/hubbard.hpp"

using namespace tmc;

namespace {

const LatticeSpec kChain2{Geometry::chain, 2, 1, false, false};
const LatticeSpec kSquare22{Geometry::square, 2, 2, true, true};
const LatticeSpec kRing8{Geometry::chain, 8, 1, true, false};

const SpinConfig kUpDown{0b01};  // 2-site chain states
const SpinConfig kDownUp{0b10};
const SpinConfig kNeelA{0b0110}; // 2x2 antiferromagnetic states
const SpinConfig kNeelB{0b1001};

EngineConfig base_config() {
    EngineConfig cfg;
    cfg.r = 30.0;
    cfg.target_population = 1000.0;
    return cfg;
}

} // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(validate(base_config()));
    auto bad = [](auto&& mutate) {
        EngineConfig cfg;
        cfg.r = 30.0;
        mutate(cfg);
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    };
    bad([](EngineConfig& c) { c.r = 0.0; });
    bad([](EngineConfig& c) { c.r = -1.0; });
    bad([](EngineConfig& c) { c.damping_xi = 0.0; });
    bad([](EngineConfig& c) { c.target_population = 0.0; });
    bad([](EngineConfig& c) { c.shift_update_period = 0; });
    bad([](EngineConfig& c) { c.c_init_threshold = 0.0; });
    bad([](EngineConfig& c) { c.n_init_threshold = -1; });
    bad([](EngineConfig& c) { c.initial_weight = 0.0; });
    bad([](EngineConfig& c) { c.initial_triplet_count = 0; });
    bad([](EngineConfig& c) { c.bias.kappa = -0.5; });
}

TEST_CASE("initiator promotion") {
    const HeisenbergXXZ model({1.0, kSquare22});
    EngineConfig cfg = base_config();
    cfg.c_init_threshold = 1.0;
    cfg.n_init_threshold = 1;
    const BiasTable flat(cfg.bias, model.max_norm()); // kappa 0: |w| == |c|

    std::vector<Triplet<SpinConfig>> ens{
        {0.5, kNeelA, kNeelA, false},  // norm 0 < 1: initiator
        {0.5, kNeelA, kNeelB, true},   // norm 2, |c| <= 1: demoted (no carry-over)
        {1.5, kNeelA, kNeelB, false},  // norm 2 but |c| > 1: initiator by weight
        {-1.5, kNeelB, kNeelA, false}, // sign does not matter
        {1.0, kNeelA, kNeelB, true},   // |c| == threshold: strict inequality fails
    };
    promote_initiators(ens, model, flat, cfg);
    CHECK(ens[0].is_initiator);
    CHECK(!ens[1].is_initiator);
    CHECK(ens[2].is_initiator);
    CHECK(ens[3].is_initiator);
    CHECK(!ens[4].is_initiator);

    // Walker-units variant: the same |c| = 1.5 class at norm 2 with
    // bias(2) = 2 holds only |w| = 0.75 walkers and is demoted; |c| = 2.5
    // (|w| = 1.25) stays an initiator. The physical-weight default is
    // unaffected by the bias table.
    const BiasTable biased(BiasParams{std::log(2.0) / 2.0, true}, model.max_norm());
    promote_initiators(ens, model, biased, cfg);
    CHECK(ens[2].is_initiator);
    cfg.initiator_walker_units = true;
    promote_initiators(ens, model, biased, cfg);
    CHECK(ens[0].is_initiator); // diagonal: still by norm
    CHECK(!ens[2].is_initiator);
    ens[2].c = 2.5;
    promote_initiators(ens, model, biased, cfg);
    CHECK(ens[2].is_initiator);
    cfg.initiator_walker_units = false;

    cfg.initiator_enabled = false; // approximation off: everyone spawns freely
    promote_initiators(ens, model, flat, cfg);
    for (const auto& t : ens) CHECK(t.is_initiator);
}

TEST_CASE("population is the weight-factor sum") {
    const HeisenbergXXZ model({1.0, kSquare22});
    const BiasParams params{std::log(2.0) / 2.0, true}; // bias(2) = 2
    const BiasTable bias(params, model.max_norm());
    CHECK(bias(2) == doctest::Approx(2.0));

    const std::vector<Triplet<SpinConfig>> ens{
        {1000.0, kNeelA, kNeelA, true}, // diagonal: bias 1
        {-6.0, kNeelA, kNeelB, false},  // norm 2: bias 2, |w| = 3
    };
    CHECK(population(ens, model, bias) == doctest::Approx(1003.0));
}

TEST_CASE("decompression splits by weight factor") {
    const HeisenbergXXZ model({1.0, kSquare22});
    const BiasParams params{std::log(2.0) / 2.0, true};
    const BiasTable bias(params, model.max_norm());
    std::vector<DecompressedChild<SpinConfig>> children;

    // |w| = 3 exactly: three children of physical weight c/|w| = 2, no rest.
    decompress(std::vector<Triplet<SpinConfig>>{{6.0, kNeelA, kNeelB, true}}, model, bias,
               /*seed=*/9, /*loop=*/0, children);
    REQUIRE(children.size() == 3);
    for (const auto& ch : children) {
        CHECK(ch.c == 2.0);
        CHECK(ch.ket == kNeelA);
        CHECK(ch.bra == kNeelB);
        CHECK(ch.parent_initiator);
    }
}

TEST_CASE("decompression rest-child statistics") {
    const HeisenbergXXZ model({1.0, kChain2});
    const BiasTable bias(BiasParams{}, model.max_norm()); // kappa 0
    std::vector<DecompressedChild<SpinConfig>> children;

    // w = 2.7: two certain children plus a rest child surviving w.p. 0.7.
    int kept = 0;
    const int trials = 20000;
    for (int loop = 0; loop < trials; ++loop) {
        decompress(std::vector<Triplet<SpinConfig>>{{2.7, kUpDown, kDownUp, false}}, model,
                   bias, 4, static_cast<std::uint64_t>(loop), children);
        REQUIRE(children.size() >= 2);
        REQUIRE(children.size() <= 3);
        for (const auto& ch : children) CHECK(ch.c == doctest::Approx(1.0));
        if (children.size() == 3) ++kept;
    }
    const double freq = static_cast<double>(kept) / trials;
    CHECK(freq == doctest::Approx(0.7).epsilon(0.02));

    // w = -0.3: at most one child of weight -1, surviving w.p. 0.3.
    kept = 0;
    for (int loop = 0; loop < trials; ++loop) {
        decompress(std::vector<Triplet<SpinConfig>>{{-0.3, kUpDown, kDownUp, false}}, model,
                   bias, 5, static_cast<std::uint64_t>(loop), children);
        REQUIRE(children.size() <= 1);
        if (!children.empty()) {
            CHECK(children[0].c == doctest::Approx(-1.0));
            ++kept;
        }
    }
    CHECK(static_cast<double>(kept) / trials == doctest::Approx(0.3).epsilon(0.03));
}

TEST_CASE("decompression is a martingale in physical weight") {
    const HeisenbergXXZ model({1.0, kChain2});
    const BiasTable bias(BiasParams{}, model.max_norm());
    std::vector<DecompressedChild<SpinConfig>> children;
    const int trials = 100000;
    double total = 0.0;
    for (int loop = 0; loop < trials; ++loop) {
        decompress(std::vector<Triplet<SpinConfig>>{{2.7, kUpDown, kDownUp, false}}, model,
                   bias, 6, static_cast<std::uint64_t>(loop), children);
        for (const auto& ch : children) total += ch.c;
    }
    const double mean = total / trials;
    // Per-trial variance is 0.7*0.3; four standard errors around 2.7.
    const double four_se = 4.0 * std::sqrt(0.21 / trials);
    CHECK(std::abs(mean - 2.7) < four_se);
}

TEST_CASE("spawn weight and target") {
    const HeisenbergXXZ model({1.0, kChain2});

    // A unit child on the diagonal dyad spawns weight -c*element*n_s/r =
    // -1 * 0.5 * 1 / 30 = -1/60 onto the pair with one side flipped.
    bool saw_ket = false, saw_bra = false;
    for (std::uint64_t k = 0; k < 32; ++k) {
        DecompressedChild<SpinConfig> child{1.0, kUpDown, kUpDown, true,
                                            CounterRng::substream(17, 0, k)};
        const auto s = spawn(child, model, 30.0);
        REQUIRE(s.has_value());
        CHECK(s->c == doctest::Approx(-1.0 / 60.0).epsilon(1e-14));
        CHECK(s->from_initiator);
        if (s->ket == kDownUp && s->bra == kUpDown) saw_ket = true;
        if (s->ket == kUpDown && s->bra == kDownUp) saw_bra = true;
    }
    CHECK(saw_ket); // both sides appear across substreams
    CHECK(saw_bra);

    // Fully hopped-out band: no interaction moves, no spawn.
    const FermiHubbard full({1.0, 4.0, 2, 0, kChain2});
    DecompressedChild<FermionConfig> stuck{1.0, FermionConfig{0b11, 0}, FermionConfig{0b11, 0},
                                           false, CounterRng::substream(17, 0, 0)};
    CHECK(!spawn(stuck, full, 30.0).has_value());

    // Weight sign flips with the child's sign: c=-2, element 0.5, n_s=8, r=4
    // gives +2 (antiferromagnetic 8-ring state has all 8 bonds antiparallel).
    const HeisenbergXXZ ring({1.0, kRing8});
    const SpinConfig neel8{0b01010101};
    REQUIRE(ring.spawn_count(neel8) == 8);
    DecompressedChild<SpinConfig> heavy{-2.0, neel8, neel8, true,
                                        CounterRng::substream(23, 0, 0)};
    const auto s = spawn(heavy, ring, 4.0);
    REQUIRE(s.has_value());
    CHECK(s->c == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("compression merges classes and applies the initiator rule") {
    using T = Triplet<SpinConfig>;
    using S = SpawnedTriplet<SpinConfig>;

    // Survivors merge with spawns on the same pair.
    {
        std::vector<S> spawns{{0.5, kNeelA, kNeelA, true}};
        const auto out = compress(std::vector<T>{{1.0, kNeelA, kNeelA, true}}, spawns);
        REQUIRE(out.size() == 1);
        CHECK(out[0].c == doctest::Approx(1.5));
    }
    // A single spawn from a non-initiator onto a fresh pair is removed.
    {
        std::vector<S> spawns{{0.5, kNeelA, kNeelB, false}};
        const auto out = compress(std::vector<T>{}, spawns);
        CHECK(out.empty());
    }
    // The same spawn from an initiator survives.
    {
        std::vector<S> spawns{{0.5, kNeelA, kNeelB, true}};
        const auto out = compress(std::vector<T>{}, spawns);
        REQUIRE(out.size() == 1);
        CHECK(out[0].c == doctest::Approx(0.5));
        CHECK(out[0].ket == kNeelA);
        CHECK(out[0].bra == kNeelB);
    }
    // Two simultaneous non-initiator spawns on the same fresh pair are kept.
    {
        std::vector<S> spawns{{0.5, kNeelA, kNeelB, false}, {-0.2, kNeelA, kNeelB, false}};
        const auto out = compress(std::vector<T>{}, spawns);
        REQUIRE(out.size() == 1);
        CHECK(out[0].c == doctest::Approx(0.3));
    }
    // A survivor anchors a lone non-initiator spawn.
    {
        std::vector<S> spawns{{0.5, kNeelA, kNeelB, false}};
        const auto out = compress(std::vector<T>{{0.25, kNeelA, kNeelB, false}}, spawns);
        REQUIRE(out.size() == 1);
        CHECK(out[0].c == doctest::Approx(0.75));
    }
    // Exact cancellation deletes the class.
    {
        std::vector<S> spawns{{-1.0, kNeelA, kNeelA, true}};
        const auto out = compress(std::vector<T>{{1.0, kNeelA, kNeelA, true}}, spawns);
        CHECK(out.empty());
    }
    // Output is sorted by (ket, bra) and one entry per class.
    {
        std::vector<S> spawns{{0.1, kNeelB, kNeelA, true},
                              {0.2, kNeelA, kNeelB, true},
                              {0.3, kNeelA, kNeelB, true}};
        const auto out = compress(
            std::vector<T>{{1.0, kNeelA, kNeelA, true}, {1.0, kNeelB, kNeelB, true}}, spawns);
        REQUIRE(out.size() == 4);
        detail::PairLess<T> less;
        for (std::size_t k = 0; k + 1 < out.size(); ++k) CHECK(less(out[k], out[k + 1]));
        CHECK(out[1].c == doctest::Approx(0.5)); // merged spawn run on (A,B)
    }
}

TEST_CASE("free evolution multiplies resolvent factors") {
    const HeisenbergXXZ tiny({1.0, kChain2});

    // Identity point: S equal to the mean diagonal leaves weights unchanged.
    std::vector<Triplet<SpinConfig>> ens{{2.0, kUpDown, kUpDown, false}};
    apply_free_evolution(ens, tiny, 30.0, -0.5);
    CHECK(ens[0].c == doctest::Approx(2.0).epsilon(1e-14));

    // r=30, S=0, both diagonals -0.5: factor 30/29.5 = 60/59.
    ens[0].c = 1.0;
    apply_free_evolution(ens, tiny, 30.0, 0.0);
    CHECK(ens[0].c == doctest::Approx(60.0 / 59.0).epsilon(1e-14));
    CHECK(ens[0].ket == kUpDown);
    CHECK(ens.size() == 1);

    // r=30, S=0, both diagonals -4 (antiferromagnetic 8-ring): factor 30/26.
    const HeisenbergXXZ ring({1.0, kRing8});
    const SpinConfig neel8{0b01010101};
    REQUIRE(ring.diagonal_energy(neel8) == doctest::Approx(-4.0));
    std::vector<Triplet<SpinConfig>> ens8{{1.0, neel8, neel8, false}};
    apply_free_evolution(ens8, ring, 30.0, 0.0);
    CHECK(ens8[0].c == doctest::Approx(30.0 / 26.0).epsilon(1e-14));

    // r=4, S=-2, zero diagonals: factor 4/6.
    const HeisenbergXXZ square({1.0, kSquare22});
    const SpinConfig flat{0b0011};
    REQUIRE(square.diagonal_energy(flat) == doctest::Approx(0.0));
    std::vector<Triplet<SpinConfig>> ensf{{3.0, flat, flat, false}};
    apply_free_evolution(ensf, square, 4.0, -2.0);
    CHECK(ensf[0].c == doctest::Approx(3.0 * 4.0 / 6.0).epsilon(1e-14));

    // Non-positive denominator is a configuration error.
    std::vector<Triplet<SpinConfig>> bad{{1.0, kNeelA, kNeelA, false}};
    CHECK_THROWS_AS(apply_free_evolution(bad, square, 1.0, 0.0), ResolventError);
}

TEST_CASE("shift update rule") {
    CHECK(update_shift(-2.0, 100.0, 100.0, 30.0, 0.1) == doctest::Approx(-2.0));
    CHECK(update_shift(0.0, std::exp(1.0) * 50.0, 50.0, 4.0, 0.1) ==
          doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(update_shift(-2.0, 150.0, 100.0, 30.0, 0.1) ==
          doctest::Approx(-2.0 - 3.0 * std::log(1.5)).epsilon(1e-12));
    CHECK(update_shift(1.0, 50.0, 100.0, 30.0, 0.1) > 1.0); // shrinking pop raises S
    CHECK_THROWS_AS(update_shift(0.0, 0.0, 100.0, 30.0, 0.1), ExtinctionError);
    CHECK_THROWS_AS(update_shift(0.0, 100.0, 0.0, 30.0, 0.1), ExtinctionError);
}

TEST_CASE("initial ensemble construction") {
    const HeisenbergXXZ square({1.0, kSquare22});
    EngineConfig cfg = base_config();
    cfg.initial_triplet_count = 2;
    cfg.initial_weight = 0.75;

    const auto ens = init_ensemble(square, cfg);
    REQUIRE(ens.size() == 2);
    CHECK(ens[0].ket == kNeelA);
    CHECK(ens[0].bra == kNeelA);
    CHECK(ens[1].ket == kNeelB);
    CHECK(ens[1].bra == kNeelB);
    for (const auto& t : ens) {
        CHECK(t.c == 0.75);
        CHECK(t.is_initiator);
    }

    cfg.initial_triplet_count = 1;
    const auto one = init_ensemble(square, cfg);
    REQUIRE(one.size() == 1);
    CHECK((one[0].ket == kNeelA || one[0].ket == kNeelB));
    CHECK(one[0].ket == one[0].bra);

    // More requested than distinct free minima: clamps (with a warning).
    cfg.initial_triplet_count = 5;
    CHECK(init_ensemble(square, cfg).size() == 2);

    // Population of a diagonal ensemble equals total weight (bias 1 at norm 0).
    cfg.initial_triplet_count = 1;
    cfg.initial_weight = 1000.0;
    cfg.bias = {0.25, true};
    const auto heavy = init_ensemble(square, cfg);
    const BiasTable bias(cfg.bias, square.max_norm());
    CHECK(population(heavy, square, bias) == doctest::Approx(1000.0));
}

TEST_CASE("one deterministic loop, frozen arithmetic") {
    // From (1, updown, updown) on the 2-site chain with r=30, S=0, kappa=0:
    // the survivor persists and exactly one spawn of weight -1/60 lands on an
    // off-diagonal pair; every diagonal pair sits at -0.5 so the free factor
    // is 60/59 for both triplets.
    const HeisenbergXXZ tiny({1.0, kChain2});
    EngineConfig cfg = base_config();
    cfg.shift_control_enabled = false;
    cfg.rng_seed = 12;

    TripletEngine<HeisenbergXXZ> engine(
        tiny, cfg, {{1.0, kUpDown, kUpDown, false}});
    const SampleRecord rec = engine.run_loop();

    CHECK(rec.loop == 0);
    CHECK(rec.shift == 0.0);
    CHECK(rec.triplet_count == 2);
    CHECK(rec.population == doctest::Approx(61.0 / 60.0).epsilon(1e-14));
    CHECK(rec.trace == doctest::Approx(60.0 / 59.0).epsilon(1e-14));
    // Numerator: (60/59)*(-0.5) from the diagonal plus (-1/59)*0.5 from the
    // off-diagonal spawn.
    CHECK(rec.energy_numerator == doctest::Approx(-30.5 / 59.0).epsilon(1e-13));

    REQUIRE(engine.ensemble().size() == 2);
    CHECK(engine.loops_done() == 1);
    CHECK(!engine.shift_armed());
}

TEST_CASE("one-loop expectation equals the exact map") {
    // The stochastic-unravelling contract: averaging the post-loop ensemble
    // over many independent streams reproduces rR_free (1 + L_int/r) applied
    // to the input matrix. Initiator removal is disabled (it is the one
    // deliberate approximation) and the input matrix is symmetric.
    const HeisenbergXXZ tiny({1.0, kChain2});
    const auto basis = enumerate_sector(tiny);
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.3, 0.3, 0.2;
    const Eigen::MatrixXd exact = exact_one_step(m, tiny, 30.0, 0.0);

    EngineConfig cfg = base_config();
    cfg.shift_control_enabled = false;
    cfg.initiator_enabled = false;

    const int trials = 100000;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(2, 2);
    for (int t = 0; t < trials; ++t) {
        cfg.rng_seed = 1000003ULL + static_cast<std::uint64_t>(t);
        TripletEngine<HeisenbergXXZ> engine(tiny, cfg,
                                            {{1.0, kUpDown, kUpDown, false},
                                             {0.3, kUpDown, kDownUp, false},
                                             {0.3, kDownUp, kUpDown, false},
                                             {0.2, kDownUp, kDownUp, false}});
        engine.run_loop();
        Eigen::MatrixXd once = Eigen::MatrixXd::Zero(2, 2);
        for (const auto& trip : engine.ensemble()) {
            once(static_cast<Eigen::Index>(basis.index(trip.ket)),
                 static_cast<Eigen::Index>(basis.index(trip.bra))) += trip.c;
        }
        sum += once;
        sumsq += once.cwiseProduct(once);
    }
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            const double mean = sum(i, j) / trials;
            const double var =
                (sumsq(i, j) - sum(i, j) * sum(i, j) / trials) / (trials - 1.0);
            const double se = std::sqrt(var / trials);
            CHECK(std::abs(mean - exact(i, j)) < 5.0 * se + 1e-12);
        }
    }
}

TEST_CASE("one-loop expectation with importance sampling and resampling on") {
    // Same contract as above, but with a strong harmonic bias (so the
    // decompression walker counts differ materially from the physical
    // weights) and with survivor resampling, covering the other loop
    // semantics. Neither may disturb the one-loop mean.
    const HeisenbergXXZ tiny({1.0, kChain2});
    const auto basis = enumerate_sector(tiny);
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.3, 0.3, 0.2;
    const Eigen::MatrixXd exact = exact_one_step(m, tiny, 30.0, 0.0);

    EngineConfig cfg = base_config();
    cfg.shift_control_enabled = false;
    cfg.initiator_enabled = false;
    cfg.bias.kappa = 2.0; // bias(1) = e: off-diagonal walker counts shrink ~3x
    cfg.resample_survivors = true;

    const int trials = 100000;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(2, 2);
    for (int t = 0; t < trials; ++t) {
        cfg.rng_seed = 2000003ULL + static_cast<std::uint64_t>(t);
        TripletEngine<HeisenbergXXZ> engine(tiny, cfg,
                                            {{1.0, kUpDown, kUpDown, false},
                                             {0.3, kUpDown, kDownUp, false},
                                             {0.3, kDownUp, kUpDown, false},
                                             {0.2, kDownUp, kDownUp, false}});
        engine.run_loop();
        Eigen::MatrixXd once = Eigen::MatrixXd::Zero(2, 2);
        for (const auto& trip : engine.ensemble()) {
            once(static_cast<Eigen::Index>(basis.index(trip.ket)),
                 static_cast<Eigen::Index>(basis.index(trip.bra))) += trip.c;
        }
        sum += once;
        sumsq += once.cwiseProduct(once);
    }
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            const double mean = sum(i, j) / trials;
            const double var =
                (sumsq(i, j) - sum(i, j) * sum(i, j) / trials) / (trials - 1.0);
            const double se = std::sqrt(var / trials);
            CHECK(std::abs(mean - exact(i, j)) < 5.0 * se + 1e-12);
        }
    }
}

TEST_CASE("identical seeds reproduce bit-identical runs") {
    const HeisenbergXXZ square({1.0, kSquare22});
    EngineConfig cfg = base_config();
    cfg.target_population = 200.0;
    cfg.initial_triplet_count = 2;
    cfg.rng_seed = 99;

    TripletEngine<HeisenbergXXZ> a(square, cfg), b(square, cfg);
    for (int loop = 0; loop < 40; ++loop) {
        const auto ra = a.run_loop();
        const auto rb = b.run_loop();
        CHECK(ra.population == rb.population);
        CHECK(ra.trace == rb.trace);
        CHECK(ra.energy_numerator == rb.energy_numerator);
        CHECK(ra.shift == rb.shift);
        CHECK(ra.triplet_count == rb.triplet_count);
    }
    REQUIRE(a.ensemble().size() == b.ensemble().size());
    for (std::size_t k = 0; k < a.ensemble().size(); ++k) {
        CHECK(a.ensemble()[k].c == b.ensemble()[k].c);
        CHECK(a.ensemble()[k].ket == b.ensemble()[k].ket);
        CHECK(a.ensemble()[k].bra == b.ensemble()[k].bra);
    }

    // A different master seed produces a different trajectory.
    EngineConfig other = cfg;
    other.rng_seed = 100;
    TripletEngine<HeisenbergXXZ> c(square, cfg), d(square, other);
    bool differs = false;
    for (int loop = 0; loop < 40; ++loop)
        if (c.run_loop().population != d.run_loop().population) differs = true;
    CHECK(differs);
}

TEST_CASE("shift control regression with a pinned seed") {
    const HeisenbergXXZ square({1.0, kSquare22});
    const double e0 = ground_state_energy(square).energy;

    EngineConfig cfg = base_config();
    cfg.r = 30.0;
    cfg.target_population = 500.0;
    cfg.initial_triplet_count = 2;
    cfg.initial_weight = 1.0;
    cfg.rng_seed = 2024;

    TripletEngine<HeisenbergXXZ> engine(square, cfg);
    std::vector<SampleRecord> records;
    records.reserve(3000);
    for (int loop = 0; loop < 3000; ++loop) records.push_back(engine.run_loop());
    CHECK(engine.shift_armed());

    // Population pinned within a factor of 4 of target after control armed.
    bool armed_seen = false;
    for (const auto& rec : records) {
        if (!armed_seen && rec.population >= cfg.target_population) armed_seen = true;
        if (armed_seen) {
            CHECK(rec.population > cfg.target_population / 4.0);
            CHECK(rec.population < cfg.target_population * 4.0);
        }
    }
    CHECK(armed_seen);

    // Shift fluctuates around E0 once controlled.
    double shift_sum = 0.0;
    for (std::size_t k = records.size() - 1000; k < records.size(); ++k)
        shift_sum += records[k].shift;
    CHECK(shift_sum / 1000.0 == doctest::Approx(e0).epsilon(0.1));

    // Projected energy over the controlled tail agrees with ED.
    const auto est = energy_series_estimate(
        std::vector<SampleRecord>(records.end() - 1000, records.end()));
    CHECK(std::abs(est.mean - e0) < std::max(5.0 * est.error, 0.05));
}
