#include <doctest.h>

#include <cmath>
#include <vector>

#include "noisypull/engine.hpp"
#include "noisypull/sf.hpp"

using namespace noisypull;

TEST_SUITE_BEGIN("sf");

TEST_CASE("derived parameters: hand-evaluated noiseless point") {
    // n = e makes every log factor 1.
    const SfParams p = sfParams(std::exp(1.0), 1, 0.0, 0, 1, 1.0);
    CHECK(p.m == 4);  // ceil(0 + sqrt(e) + 1 + 1)
    CHECK(p.w == 100);
    CHECK(p.T == 4);
    CHECK(p.L == 10);
}

TEST_CASE("derived parameters: noisy point") {
    const SfParams p = sfParams(100.0, 10, 0.25, 0, 1, 1.0);
    CHECK(p.m == 558);
    CHECK(p.w == 400);  // ceil(100 / 0.25)
    CHECK(p.T == 56);
}

TEST_CASE("w is 100 whenever delta=0") {
    for (double n : {10.0, 1000.0}) CHECK(sfParams(n, 3, 0.0, 1, 2, 1.0).w == 100);
}

TEST_CASE("L at n=1000") { CHECK(sfParams(1000.0, 10, 0.1, 0, 1, 1.0).L == 70); }

TEST_CASE("delta >= 1/2 is rejected") {
    CHECK_THROWS_AS(sfParams(100.0, 1, 0.5, 0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("explicit m override bypasses the formula") {
    const SfParams p = sfParams(100.0, 7, 0.1, 0, 1, 1.0, 50);
    CHECK(p.m == 50);
    CHECK(p.T == 8);  // ceil(50/7)
}

TEST_CASE("display rule per phase") {
    SfAgentState nonSource;
    CHECK(sfDisplay(nonSource) == 0);  // phase 0
    nonSource.phase = SfPhase::Phase1;
    CHECK(sfDisplay(nonSource) == 1);

    SfAgentState source;
    source.isSource = true;
    source.preference = 0;
    CHECK(sfDisplay(source) == 0);
    source.phase = SfPhase::Phase1;
    CHECK(sfDisplay(source) == 0);  // sources always show their preference

    SfAgentState booster;
    booster.phase = SfPhase::Boost;
    booster.opinion = 1;
    CHECK(sfDisplay(booster) == 1);
}

TEST_CASE("majority bit") {
    RngStream rng(1, 0, 0);
    CHECK(majorityBit(3, 5, rng) == 1);
    CHECK(majorityBit(5, 3, rng) == 0);

    int ones = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        RngStream coin(42, t, 0);
        ones += majorityBit(4, 4, coin);
    }
    CHECK(std::abs(static_cast<double>(ones) / trials - 0.5) < 0.01);
}

TEST_CASE("phase 0 counts 1-messages") {
    SfParams p = sfParams(100.0, 3, 0.0, 0, 1, 1.0, 30);
    SfAgentState s;
    RngStream rng(1, 0, 0);
    const std::vector<std::uint8_t> msgs{1, 0, 1};
    sfReceive(s, msgs, p, rng);
    CHECK(s.counter1 == 2);
    CHECK(s.counter0 == 0);
}

TEST_CASE("weak opinion at the end of phase 1") {
    // One round per phase (m = h), hand-fed messages.
    SfParams p = sfParams(100.0, 8, 0.0, 0, 1, 1.0, 8);
    REQUIRE(p.T == 1);
    SfAgentState s;
    RngStream rng(1, 0, 0);
    sfReceive(s, std::vector<std::uint8_t>{1, 1, 1, 1, 1, 0, 0, 0}, p, rng);  // counter1 = 5
    REQUIRE(s.phase == SfPhase::Phase1);
    const bool updated =
        sfReceive(s, std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 1, 1}, p, rng);  // counter0 = 3
    CHECK(updated);
    CHECK(s.counter1 == 5);
    CHECK(s.counter0 == 3);
    CHECK(s.weakOpinion == 1);
    CHECK(s.opinion == 1);
    CHECK(s.phase == SfPhase::Boost);
    CHECK(s.subPhase == 1);
}

TEST_CASE("phase-1 tie breaks with a fair coin") {
    SfParams p = sfParams(100.0, 4, 0.0, 0, 1, 1.0, 4);
    int ones = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        SfAgentState s;
        RngStream rng(7, t, 0);
        sfReceive(s, std::vector<std::uint8_t>{1, 1, 0, 0}, p, rng);
        sfReceive(s, std::vector<std::uint8_t>{0, 0, 1, 1}, p, rng);
        ones += s.weakOpinion;  // counter1 = 2, counter0 = 2
    }
    CHECK(std::abs(static_cast<double>(ones) / trials - 0.5) < 0.01);
}

TEST_CASE("strict-m mode caps counted messages at m") {
    SfParams p = sfParams(100.0, 7, 0.0, 0, 1, 1.0, 5);
    p.strictM = true;
    SfAgentState strict;
    RngStream rng(1, 0, 0);
    sfReceive(strict, std::vector<std::uint8_t>{1, 1, 1, 1, 1, 1, 1}, p, rng);
    CHECK(strict.counter1 == 5);

    p.strictM = false;
    SfAgentState lax;
    sfReceive(lax, std::vector<std::uint8_t>{1, 1, 1, 1, 1, 1, 1}, p, rng);
    CHECK(lax.counter1 == 7);
}

TEST_CASE("schedule exactness through the engine") {
    PopulationConfig cfg;
    cfg.n = 30;
    cfg.h = 7;
    cfg.s1 = 1;
    cfg.noise = NoiseMatrix::uniform(2, 0.0);
    cfg.seed = 5;
    const SfParams p = sfParams(30.0, 7, 0.0, 0, 1, 1.0, 50);
    // T = ceil(50/7) = 8; w = 100 -> ceil(100/7) = 15 rounds per short
    // sub-phase; L = ceil(10 ln 30) = 35; long sub-phase 8 rounds.
    REQUIRE(p.scheduleRounds() == 2 * 8 + 35 * 15 + 8);

    Runner<SfProtocol> runner(cfg, p);
    std::uint64_t allDoneAt = 0;
    for (std::uint64_t r = 1; r <= p.scheduleRounds(); ++r) {
        runner.step();
        bool allDone = true;
        for (const auto& a : runner.agents())
            if (a.phase != SfPhase::Done) allDone = false;
        if (allDone) {
            allDoneAt = r;
            break;
        }
    }
    CHECK(allDoneAt == p.scheduleRounds());
}

TEST_CASE("sub-phase memory is emptied at every boundary") {
    PopulationConfig cfg;
    cfg.n = 10;
    cfg.h = 5;
    cfg.s1 = 1;
    cfg.noise = NoiseMatrix::uniform(2, 0.0);
    cfg.seed = 3;
    const SfParams p = sfParams(10.0, 5, 0.0, 0, 1, 1.0, 10);
    Runner<SfProtocol> runner(cfg, p);
    const std::uint64_t wRounds = p.shortSubPhaseRounds();
    for (std::uint64_t r = 1; r <= p.scheduleRounds(); ++r) {
        runner.step();
        if (r <= 2 * p.T) continue;
        const std::uint64_t boostRound = r - 2 * p.T;
        const auto& a = runner.agents()[2];
        if (a.phase == SfPhase::Boost && boostRound % wRounds == 0 &&
            boostRound <= p.L * wRounds) {
            CHECK(a.boostCount0 + a.boostCount1 == 0);  // just flushed
        }
    }
}

TEST_CASE("neutrality: a sourceless population has a fair weak opinion") {
    PopulationConfig cfg;
    cfg.n = 2000;
    cfg.h = 10;
    cfg.s0 = 0;
    cfg.s1 = 0;
    cfg.exploratory = true;  // bias 0 is out of contract
    cfg.noise = NoiseMatrix::uniform(2, 0.1);
    cfg.seed = 2718;
    const SfParams p = sfParams(2000.0, 10, 0.1, 0, 0, 1.0, 100);
    Runner<SfProtocol> runner(cfg, p);
    for (std::uint64_t r = 0; r < 2 * p.T; ++r) runner.step();
    std::uint64_t ones = 0;
    for (const auto& a : runner.agents()) ones += a.weakOpinion;
    const double freq = static_cast<double>(ones) / cfg.n;
    const double band = 3.0 * 0.5 / std::sqrt(static_cast<double>(cfg.n));
    CHECK(std::abs(freq - 0.5) <= band);
}

TEST_SUITE_END();
