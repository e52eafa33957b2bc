#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "fmatsp/qubo.hpp"

using namespace fmatsp;

namespace {

QuboMatrix random_qubo(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    QuboMatrix q(n);
    q.offset = gauss(rng);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) q.set(i, j, gauss(rng));
    }
    return q;
}

FmModel random_model(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    FmModel m(n, k);
    m.w0 = gauss(rng);
    for (double& w : m.w) w = gauss(rng);
    for (double& v : m.v) v = gauss(rng);
    return m;
}

BitString random_bits(std::size_t n, std::mt19937_64& rng) {
    BitString b(n);
    for (std::size_t pos = 0; pos < n; ++pos) b.set(pos, rng() & 1U);
    return b;
}

// Plain enumeration of all states, independent of the Gray-order walk.
double brute_min_energy(const QuboMatrix& q) {
    double best = INFINITY;
    for (std::uint64_t value = 0; value < (std::uint64_t{1} << q.size()); ++value) {
        best = std::min(best, qubo_energy(q, BitString::from_value(value, q.size())));
    }
    return best;
}

}  // namespace

TEST_CASE("energy of small QUBOs") {
    QuboMatrix q(3);
    q.offset = 0.5;
    q.set(0, 0, 1.0);
    q.set(1, 1, -2.0);
    q.set(2, 2, 3.0);
    q.set(0, 1, 4.0);
    q.set(2, 0, -1.5);
    CHECK(q.at(0, 2) == -1.5);
    CHECK(q.at(2, 0) == -1.5);
    CHECK(qubo_energy(q, BitString::from_string("000")) == 0.5);
    CHECK(qubo_energy(q, BitString::from_string("100")) == 1.5);
    CHECK(qubo_energy(q, BitString::from_string("110")) == 3.5);
    CHECK(qubo_energy(q, BitString::from_string("101")) == 3.0);
    CHECK(qubo_energy(q, BitString::from_string("111")) == 5.0);
    CHECK_THROWS_AS(qubo_energy(q, BitString::from_string("11")), ValidationError);
}

TEST_CASE("FM to QUBO preserves predictions") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 30;
        const FmModel m = random_model(n, 1 + rng() % 8, rng);
        const QuboMatrix q = fm_to_qubo(m);
        for (int s = 0; s < 10; ++s) {
            const BitString x = random_bits(n, rng);
            REQUIRE(std::abs(qubo_energy(q, x) - fm_predict(m, x)) <= 1e-9);
        }
    }
}

TEST_CASE("FM to QUBO structure") {
    std::mt19937_64 rng(12);
    FmModel m = random_model(5, 3, rng);
    std::fill(m.v.begin(), m.v.end(), 0.0);
    QuboMatrix q = fm_to_qubo(m);
    CHECK(q.offset == m.w0);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(q.at(i, i) == m.w[i]);
        for (std::size_t j = i + 1; j < 5; ++j) CHECK(q.at(i, j) == 0.0);
    }

    FmModel unit(2, 2);
    unit.v = {1.0, 0.0, 1.0, 0.0};
    CHECK(fm_to_qubo(unit).at(0, 1) == 1.0);

    // Relabelling features relabels the QUBO the same way.
    const FmModel base = random_model(6, 2, rng);
    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    FmModel moved(6, 2);
    moved.w0 = base.w0;
    for (std::size_t i = 0; i < 6; ++i) {
        moved.w[perm[i]] = base.w[i];
        for (std::size_t f = 0; f < 2; ++f) moved.v[perm[i] * 2 + f] = base.latent(i, f);
    }
    const QuboMatrix qa = fm_to_qubo(base);
    const QuboMatrix qb = fm_to_qubo(moved);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = i; j < 6; ++j) CHECK(qb.at(perm[i], perm[j]) == Catch::Approx(qa.at(i, j)));
    }
}

TEST_CASE("incremental deltas track exact energies") {
    std::mt19937_64 rng(13);
    const QuboMatrix q = random_qubo(20, rng);
    IncrementalQubo walker(q);
    std::vector<std::uint8_t> start(20);
    for (auto& b : start) b = rng() & 1U;
    walker.reset(start);
    CHECK(walker.energy() == Catch::Approx(qubo_energy(q, walker.to_bits())));
    for (int step = 0; step < 10000; ++step) {
        const std::size_t i = rng() % 20;
        const double predicted = walker.energy() + walker.delta(i);
        walker.flip(i);
        REQUIRE(std::abs(walker.energy() - predicted) <= 1e-9);
        if (step % 97 == 0) REQUIRE(std::abs(walker.energy() - qubo_energy(q, walker.to_bits())) <= 1e-8);
    }
}

TEST_CASE("annealing on separable QUBOs") {
    QuboMatrix positive(12);
    QuboMatrix negative(12);
    for (std::size_t i = 0; i < 12; ++i) {
        positive.set(i, i, 1.0 + static_cast<double>(i));
        negative.set(i, i, -1.0);
    }
    AnnealSchedule sched;
    sched.sweeps = 200;
    sched.restarts = 3;
    CHECK(anneal(positive, sched).state == BitString(12));
    const AnnealResult all_on = anneal(negative, sched);
    CHECK(all_on.state.popcount() == 12);
    CHECK(all_on.energy == -12.0);
}

TEST_CASE("default temperatures") {
    QuboMatrix zero(4);
    CHECK(resolve_temperatures(zero, {}) == std::pair{1.0, 0.001});
    QuboMatrix q(3);
    q.set(0, 0, 2.0);
    q.set(1, 2, -4.0);
    q.set(2, 2, 6.0);
    const auto [t0, t1] = resolve_temperatures(q, {});
    CHECK(t0 == Catch::Approx(40.0));
    CHECK(t1 == Catch::Approx(0.04));
    AnnealSchedule bad;
    bad.t_initial = 0.1;
    bad.t_final = 1.0;
    CHECK_THROWS_AS(resolve_temperatures(q, bad), ValidationError);
    AnnealSchedule none;
    none.sweeps = 0;
    CHECK_THROWS_AS(anneal(q, none), ValidationError);
}

TEST_CASE("exhaustive search on hand-built QUBOs") {
    QuboMatrix q(4);
    q.set(0, 0, -1.0);
    q.set(1, 1, 2.0);
    q.set(2, 2, -3.0);
    q.set(3, 3, 0.5);
    const AnnealResult r = exhaustive_qubo_min(q);
    CHECK(r.state.to_string() == "1010");
    CHECK(r.energy == -4.0);

    // Two optima; the smaller integer value wins.
    QuboMatrix tied(2);
    tied.set(0, 0, -1.0);
    tied.set(1, 1, -1.0);
    tied.set(0, 1, 1.0);
    CHECK(exhaustive_qubo_min(tied).state.to_string() == "01");

    CHECK_THROWS_AS(exhaustive_qubo_min(QuboMatrix(25)), ResourceError);
}

TEST_CASE("exhaustive search agrees with plain enumeration") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const QuboMatrix q = random_qubo(1 + trial % 12, rng);
        const AnnealResult r = exhaustive_qubo_min(q);
        REQUIRE(r.energy == Catch::Approx(brute_min_energy(q)).margin(1e-12));
        REQUIRE(r.energy == Catch::Approx(qubo_energy(q, r.state)));
    }
}

TEST_CASE("annealer finds the exhaustive optimum") {
    std::mt19937_64 rng(15);
    int hits = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        const QuboMatrix q = random_qubo(8 + trial % 9, rng);
        const AnnealResult exact = exhaustive_qubo_min(q);
        AnnealSchedule sched;
        sched.seed = static_cast<std::uint64_t>(trial);
        const AnnealResult found = anneal(q, sched);
        REQUIRE(found.energy >= exact.energy - 1e-9);
        if (found.energy <= exact.energy + 1e-9) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("annealing is deterministic and monotone in restarts") {
    std::mt19937_64 rng(16);
    const QuboMatrix q = random_qubo(30, rng);
    AnnealSchedule sched;
    sched.sweeps = 100;
    sched.seed = 5;
    const AnnealResult a = anneal(q, sched);
    const AnnealResult b = anneal(q, sched);
    CHECK(a.state == b.state);
    CHECK(a.energy == b.energy);
    double previous = INFINITY;
    for (int restarts = 1; restarts <= 8; ++restarts) {
        sched.restarts = restarts;
        const double e = anneal(q, sched).energy;
        CHECK(e <= previous);
        previous = e;
    }
}
