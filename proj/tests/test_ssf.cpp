#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "noisypull/engine.hpp"
#include "noisypull/ssf.hpp"

using namespace noisypull;

TEST_SUITE_BEGIN("ssf");

TEST_CASE("derived parameters") {
    CHECK(ssfParams(100.0, 0.0).m == 100);   // formula collapses to n
    CHECK(ssfParams(100.0, 0.1).m == 228);   // ceil(127.92 + 100)
    CHECK_THROWS_AS(ssfParams(100.0, 0.25), std::invalid_argument);
}

TEST_CASE("symbol encoding is the pinned bijection") {
    CHECK(Symbol2{0, 0}.index() == 0);
    CHECK(Symbol2{0, 1}.index() == 1);
    CHECK(Symbol2{1, 0}.index() == 2);
    CHECK(Symbol2{1, 1}.index() == 3);
    for (std::uint8_t i = 0; i < 4; ++i) CHECK(Symbol2::fromIndex(i).index() == i);
}

TEST_CASE("display rule") {
    SsfAgentState source;
    source.isSource = true;
    source.preference = 0;
    CHECK(ssfDisplay(source) == Symbol2{1, 0}.index());

    SsfAgentState nonSource;
    nonSource.weakOpinion = 1;
    CHECK(ssfDisplay(nonSource) == Symbol2{0, 1}.index());

    nonSource.weakOpinion = 0;  // e.g. forced adversarially
    CHECK(ssfDisplay(nonSource) == Symbol2{0, 0}.index());
}

TEST_CASE("update rule: hand-counted memory") {
    // Memory at update: {(1,1), (1,1), (1,0), (0,0), (0,0)}.
    // Source-tagged counts 2 vs 1 -> weak opinion 1.
    // Value bits 1,1,0,0,0 -> opinion 0.
    SsfParams p;
    p.m = 5;
    SsfAgentState s;
    RngStream rng(1, 0, 0);
    const std::vector<std::uint8_t> msgs{3, 3, 2, 0, 0};
    const bool updated = ssfReceive(s, msgs, p, rng);
    CHECK(updated);
    CHECK(s.weakOpinion == 1);
    CHECK(s.opinion == 0);
    CHECK(s.memorySize() == 0);  // flushed
}

TEST_CASE("no update below capacity") {
    SsfParams p;
    p.m = 10;
    SsfAgentState s;
    s.weakOpinion = 1;
    s.opinion = 1;
    RngStream rng(1, 0, 0);
    CHECK_FALSE(ssfReceive(s, std::vector<std::uint8_t>{0, 0, 0}, p, rng));
    CHECK(s.weakOpinion == 1);
    CHECK(s.opinion == 1);
    CHECK(s.memorySize() == 3);
}

TEST_CASE("zero source-tagged messages break the weak opinion with a fair coin") {
    SsfParams p;
    p.m = 4;
    int ones = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        SsfAgentState s;
        RngStream rng(13, t, 0);
        ssfReceive(s, std::vector<std::uint8_t>{0, 0, 0, 0}, p, rng);
        ones += s.weakOpinion;
    }
    CHECK(std::abs(static_cast<double>(ones) / trials - 0.5) < 0.01);
}

TEST_CASE("h = m fires an update every round") {
    PopulationConfig cfg;
    cfg.n = 12;
    cfg.h = 6;
    cfg.s1 = 1;
    cfg.noise = NoiseMatrix::uniform(4, 0.0);
    cfg.seed = 21;
    SsfParams p;
    p.m = 6;
    Runner<SsfProtocol> runner(cfg, p);
    for (int r = 0; r < 5; ++r) {
        const RoundStats stats = runner.step();
        CHECK(stats.updatesPerformed == cfg.n);
    }
}

TEST_CASE("clean start updates exactly every ceil(m/h) rounds") {
    PopulationConfig cfg;
    cfg.n = 20;
    cfg.h = 4;
    cfg.s1 = 1;
    cfg.noise = NoiseMatrix::uniform(4, 0.1);
    cfg.seed = 8;
    SsfParams p = ssfParams(20.0, 0.1, 1.0, 22);  // cadence = ceil(22/4) = 6
    Runner<SsfProtocol> runner(cfg, p);
    for (std::uint64_t r = 1; r <= 30; ++r) {
        const RoundStats stats = runner.step();
        if (r % 6 == 0)
            CHECK(stats.updatesPerformed == cfg.n);
        else
            CHECK(stats.updatesPerformed == 0);
    }
}

TEST_CASE("adversarial memory sizes stagger first updates, then cadence settles") {
    PopulationConfig cfg;
    cfg.n = 4;
    cfg.h = 2;
    cfg.s1 = 1;
    cfg.noise = NoiseMatrix::uniform(4, 0.0);
    cfg.seed = 99;
    SsfParams p;
    p.m = 10;  // cadence 5
    Runner<SsfProtocol> runner(cfg, p);

    AdversarySpec adv;
    adv.agents.push_back({1, std::nullopt, std::nullopt, std::array<std::uint32_t, 4>{8, 0, 0, 0}});
    adv.agents.push_back({2, std::nullopt, std::nullopt, std::array<std::uint32_t, 4>{0, 5, 0, 0}});
    runner.applyAdversary(adv);

    // The flush happens right after appending, so memory size 0 after a
    // round means the update fired in that round.
    std::map<std::uint64_t, std::vector<std::uint64_t>> updateRounds;
    for (std::uint64_t r = 1; r <= 20; ++r) {
        runner.step();
        for (std::uint64_t i = 0; i < cfg.n; ++i)
            if (runner.agents()[i].memorySize() == 0) updateRounds[i].push_back(r);
    }
    // Stuffed agents reach capacity sooner.
    CHECK(updateRounds[1].front() == 1);  // 8 + 2 >= 10
    CHECK(updateRounds[2].front() == 3);  // 5 + 6 >= 10
    CHECK(updateRounds[0].front() == 5);
    // After the first update every agent settles on the ceil(m/h) cadence.
    for (const auto& [agent, rounds] : updateRounds) {
        for (std::size_t k = 1; k < rounds.size(); ++k)
            CHECK(rounds[k] - rounds[k - 1] == 5);
    }
}

TEST_CASE("memory holds only delivered messages after the first update") {
    PopulationConfig cfg;
    cfg.n = 6;
    cfg.h = 3;
    cfg.s1 = 1;
    cfg.noise = NoiseMatrix::uniform(4, 0.1);
    cfg.seed = 4;
    SsfParams p;
    p.m = 9;
    Runner<SsfProtocol> runner(cfg, p);

    AdversarySpec adv;
    for (std::uint64_t i = 0; i < cfg.n; ++i)
        adv.agents.push_back(
            {i, 0, 0, std::array<std::uint32_t, 4>{static_cast<std::uint32_t>(i), 0, 0, 0}});
    runner.applyAdversary(adv);

    std::vector<bool> updatedOnce(cfg.n, false);
    for (std::uint64_t r = 1; r <= 24; ++r) {
        const std::uint64_t updatesBefore = 0;
        (void)updatesBefore;
        std::vector<std::uint64_t> sizeBefore(cfg.n);
        for (std::uint64_t i = 0; i < cfg.n; ++i) sizeBefore[i] = runner.agents()[i].memorySize();
        runner.step();
        for (std::uint64_t i = 0; i < cfg.n; ++i) {
            const auto& a = runner.agents()[i];
            if (a.memorySize() < sizeBefore[i] + cfg.h) updatedOnce[i] = true;
            if (updatedOnce[i]) CHECK(a.adversarialTagged == 0);
        }
    }
    for (std::uint64_t i = 0; i < cfg.n; ++i) CHECK(updatedOnce[i]);
}

TEST_CASE("a source's displayed symbol never changes") {
    PopulationConfig cfg;
    cfg.n = 40;
    cfg.h = 5;
    cfg.s1 = 2;
    cfg.s0 = 1;
    cfg.noise = NoiseMatrix::uniform(4, 0.12);
    cfg.seed = 31;
    SsfParams p = ssfParams(40.0, 0.12);
    Runner<SsfProtocol> runner(cfg, p);
    std::vector<std::uint8_t> first;
    for (std::uint64_t r = 0; r < 40; ++r) {
        runner.step();
        if (first.empty()) {
            first.assign(runner.displays().begin(), runner.displays().end());
            continue;
        }
        for (std::int64_t i = 0; i < cfg.s0 + cfg.s1; ++i)
            CHECK(runner.displays()[i] == first[i]);
    }
}

TEST_SUITE_END();
