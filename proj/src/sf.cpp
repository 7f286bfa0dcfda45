#include "noisypull/sf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noisypull {

int majorityBit(std::uint64_t count0, std::uint64_t count1, RngStream& rng) {
    if (count1 > count0) return 1;
    if (count0 > count1) return 0;
    return rng.fairCoin() ? 1 : 0;
}

SfParams sfParams(double n, std::uint64_t h, double delta, std::int64_t s0, std::int64_t s1,
                  double c1, std::uint64_t mOverride, double logBase) {
    if (n < 1.0) throw std::invalid_argument("population must be >= 1");
    if (h < 1) throw std::invalid_argument("sample size must be >= 1");
    if (delta < 0.0 || delta >= 0.5)
        throw std::invalid_argument("requires delta in [0, 1/2): the two-phase bias vanishes");
    const std::int64_t s = s1 > s0 ? s1 - s0 : s0 - s1;
    if (mOverride == 0 && s < 1) throw std::invalid_argument("requires bias |s1-s0| >= 1");

    SfParams p;
    p.c1 = c1;
    p.delta = delta;
    p.h = h;
    const double oneMinus = 1.0 - 2.0 * delta;
    p.w = static_cast<std::uint64_t>(std::ceil(100.0 / (oneMinus * oneMinus)));
    const double logn = logBase > 0.0 ? std::log(n) / std::log(logBase) : std::log(n);
    p.L = static_cast<std::uint64_t>(std::ceil(10.0 * logn));

    if (mOverride > 0) {
        p.m = mOverride;
    } else {
        const double sd = static_cast<double>(s);
        const double minS2n = std::min(sd * sd, n);
        const double sum = n * delta * logn / (minS2n * oneMinus * oneMinus) +
                           std::sqrt(n) * logn / sd +
                           static_cast<double>(s0 + s1) * logn / (sd * sd) +
                           static_cast<double>(h) * logn;
        p.m = static_cast<std::uint64_t>(std::ceil(c1 * sum));
        if (p.m < 1) p.m = 1;
    }
    p.T = (p.m + h - 1) / h;
    return p;
}

std::uint8_t sfDisplay(const SfAgentState& s) {
    switch (s.phase) {
        case SfPhase::Phase0: return s.isSource ? s.preference : 0;
        case SfPhase::Phase1: return s.isSource ? s.preference : 1;
        case SfPhase::Boost:
        case SfPhase::Done: return s.opinion;
    }
    return 0;
}

namespace {

// Counts the phase's target bit among the round's messages, honoring the
// strict-m cap on the first m messages.
std::uint64_t countPhaseBit(SfAgentState& s, std::span<const std::uint8_t> messages,
                            const SfParams& p, std::uint8_t target) {
    std::uint64_t hits = 0;
    for (const std::uint8_t b : messages) {
        if (!p.strictM || s.phaseMessages < p.m) {
            if (b == target) ++hits;
        }
        ++s.phaseMessages;
    }
    return hits;
}

} // namespace

bool sfReceive(SfAgentState& s, std::span<const std::uint8_t> messages, const SfParams& p,
               RngStream& rng) {
    switch (s.phase) {
        case SfPhase::Phase0: {
            s.counter1 += countPhaseBit(s, messages, p, 1);
            if (++s.phaseRounds == p.T) {
                s.phase = SfPhase::Phase1;
                s.phaseRounds = 0;
                s.phaseMessages = 0;
            }
            return false;
        }
        case SfPhase::Phase1: {
            s.counter0 += countPhaseBit(s, messages, p, 0);
            if (++s.phaseRounds == p.T) {
                s.weakOpinion = static_cast<std::uint8_t>(majorityBit(s.counter0, s.counter1, rng));
                s.opinion = s.weakOpinion;
                s.phase = SfPhase::Boost;
                s.subPhase = 1;
                s.boostCount0 = 0;
                s.boostCount1 = 0;
                return true;
            }
            return false;
        }
        case SfPhase::Boost: {
            for (const std::uint8_t b : messages) {
                if (b == 1)
                    ++s.boostCount1;
                else
                    ++s.boostCount0;
            }
            const std::uint64_t size = static_cast<std::uint64_t>(s.boostCount0) + s.boostCount1;
            const bool shortDone = s.subPhase <= p.L && size >= p.w;
            const bool longDone = s.subPhase == p.L + 1 && size >= p.m;
            if (shortDone || longDone) {
                s.opinion = static_cast<std::uint8_t>(majorityBit(s.boostCount0, s.boostCount1, rng));
                s.boostCount0 = 0;
                s.boostCount1 = 0;
                if (++s.subPhase > p.L + 1) s.phase = SfPhase::Done;
                return true;
            }
            return false;
        }
        case SfPhase::Done: return false;
    }
    return false;
}

} // namespace noisypull
