#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "noisypull/rng.hpp"

using namespace noisypull;

TEST_SUITE_BEGIN("rng");

TEST_CASE("identical keys replay the same sequence") {
    RngStream a(42, 7, 3);
    RngStream b(42, 7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("streams with different agent or round keys diverge") {
    RngStream base(42, 7, 3);
    RngStream otherAgent(42, 8, 3);
    RngStream otherRound(42, 7, 4);
    RngStream otherSeed(43, 7, 3);
    const std::uint64_t v = base.next();
    CHECK(v != otherAgent.next());
    CHECK(v != otherRound.next());
    CHECK(v != otherSeed.next());
}

TEST_CASE("nextDouble stays in [0,1)") {
    RngStream rng(1, 0, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.nextDouble();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("nextBelow(1) returns 0 from a single draw") {
    RngStream rng(9, 1, 2);
    CHECK(rng.nextBelow(1) == 0);
    CHECK(rng.drawCount() == 1);
}

TEST_CASE("nextBelow covers the full range") {
    RngStream rng(5, 0, 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(rng.nextBelow(8));
    CHECK(seen.size() == 8);
}

TEST_CASE("fair coin is balanced") {
    RngStream rng(11, 2, 2);
    int heads = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) heads += rng.fairCoin() ? 1 : 0;
    const double freq = static_cast<double>(heads) / trials;
    CHECK(std::abs(freq - 0.5) < 0.005);
}

TEST_CASE("init-round streams are distinct from round-0 streams") {
    RngStream init(3, 4, kInitRound);
    RngStream round0(3, 4, 0);
    CHECK(init.next() != round0.next());
}

TEST_SUITE_END();
