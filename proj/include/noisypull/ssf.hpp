#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "noisypull/rng.hpp"

namespace noisypull {

/// Two-bit message: (sourceBit, valueBit) <-> alphabet index 2*sourceBit + valueBit.
struct Symbol2 {
    std::uint8_t sourceBit = 0;
    std::uint8_t valueBit = 0;

    std::uint8_t index() const { return static_cast<std::uint8_t>(2 * sourceBit + valueBit); }
    static Symbol2 fromIndex(std::uint8_t idx) {
        return {static_cast<std::uint8_t>(idx >> 1), static_cast<std::uint8_t>(idx & 1)};
    }
};

/// Parameters of the self-stabilizing variant on the 4-symbol alphabet.
struct SsfParams {
    std::uint64_t m = 0;  // memory capacity that triggers an update
    double c1 = 1.0;
    double delta = 0.0;

    std::uint64_t updateCadenceRounds(std::uint64_t h) const { return (m + h - 1) / h; }
};

/// m = ceil(c1 * (delta*n*log n/(1-4*delta)^2 + n)), or an explicit override.
/// Rejects delta >= 1/4.
SsfParams ssfParams(double n, double delta, double c1 = 1.0, std::uint64_t mOverride = 0,
                    double logBase = 0.0);

struct SsfAgentState {
    bool isSource = false;
    std::uint8_t preference = 0;
    std::array<std::uint32_t, 4> memory{};  // message multiset kept as per-symbol counts
    std::uint32_t adversarialTagged = 0;    // memory entries not produced by delivery
    std::uint8_t weakOpinion = 0;
    std::uint8_t opinion = 0;

    std::uint64_t memorySize() const {
        return static_cast<std::uint64_t>(memory[0]) + memory[1] + memory[2] + memory[3];
    }
};

std::uint8_t ssfDisplay(const SsfAgentState& s);

/// Appends the round's messages; on reaching capacity recomputes weak
/// opinion (source-tagged values), then opinion (all values), then flushes.
/// Returns true when an update fired.
bool ssfReceive(SsfAgentState& s, std::span<const std::uint8_t> messages, const SsfParams& p,
                RngStream& rng);

struct AgentOverride;

struct SsfProtocol {
    using Params = SsfParams;
    using State = SsfAgentState;
    static constexpr int kAlphabet = 4;

    static State initial(bool isSource, std::uint8_t preference, const Params&, RngStream& rng) {
        State s;
        s.isSource = isSource;
        s.preference = preference;
        s.weakOpinion = rng.fairCoin() ? 1 : 0;
        s.opinion = rng.fairCoin() ? 1 : 0;
        return s;
    }
    static std::uint8_t display(const State& s) { return ssfDisplay(s); }
    static bool receive(State& s, std::span<const std::uint8_t> messages, const Params& p,
                        RngStream& rng) {
        return ssfReceive(s, messages, p, rng);
    }
    static bool opinion(const State& s) { return s.opinion != 0; }
    static bool weakOpinion(const State& s) { return s.weakOpinion != 0; }

    static void checkParams(const Params&, std::uint64_t) {}
    static std::uint64_t fixedScheduleRounds(const Params&, std::uint64_t) { return 0; }
    static std::uint64_t opinionValidFrom(const Params&) { return 1; }
    static void applyOverride(State& s, const AgentOverride& o);
};

} // namespace noisypull
