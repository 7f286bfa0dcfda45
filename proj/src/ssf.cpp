#include "noisypull/ssf.hpp"

#include <cmath>
#include <stdexcept>

#include "noisypull/sf.hpp"

namespace noisypull {

SsfParams ssfParams(double n, double delta, double c1, std::uint64_t mOverride, double logBase) {
    if (n < 1.0) throw std::invalid_argument("population must be >= 1");
    if (delta < 0.0 || delta >= 0.25)
        throw std::invalid_argument(
            "requires delta in [0, 1/4): the source-tag signal vanishes on 4 symbols");

    SsfParams p;
    p.c1 = c1;
    p.delta = delta;
    if (mOverride > 0) {
        p.m = mOverride;
    } else {
        const double logn = logBase > 0.0 ? std::log(n) / std::log(logBase) : std::log(n);
        const double oneMinus = 1.0 - 4.0 * delta;
        p.m = static_cast<std::uint64_t>(
            std::ceil(c1 * (delta * n * logn / (oneMinus * oneMinus) + n)));
        if (p.m < 1) p.m = 1;
    }
    return p;
}

std::uint8_t ssfDisplay(const SsfAgentState& s) {
    const Symbol2 sym = s.isSource ? Symbol2{1, s.preference} : Symbol2{0, s.weakOpinion};
    return sym.index();
}

bool ssfReceive(SsfAgentState& s, std::span<const std::uint8_t> messages, const SsfParams& p,
                RngStream& rng) {
    for (const std::uint8_t msg : messages) ++s.memory[msg];
    if (s.memorySize() < p.m) return false;

    // Weak opinion first, then opinion; tie coins are drawn in that order.
    s.weakOpinion = static_cast<std::uint8_t>(majorityBit(s.memory[2], s.memory[3], rng));
    const std::uint64_t value0 = static_cast<std::uint64_t>(s.memory[0]) + s.memory[2];
    const std::uint64_t value1 = static_cast<std::uint64_t>(s.memory[1]) + s.memory[3];
    s.opinion = static_cast<std::uint8_t>(majorityBit(value0, value1, rng));
    s.memory = {0, 0, 0, 0};
    s.adversarialTagged = 0;
    return true;
}

} // namespace noisypull
