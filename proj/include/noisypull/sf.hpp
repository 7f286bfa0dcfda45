#pragma once

#include <cstdint>
#include <span>

#include "noisypull/rng.hpp"

namespace noisypull {

/// 1 if count1 > count0, 0 if count0 > count1, fair coin on a tie.
int majorityBit(std::uint64_t count0, std::uint64_t count1, RngStream& rng);

/// Parameters of the two-phase counting protocol with majority boosting.
/// Binary alphabet; runs on a fixed schedule from a simultaneous start.
struct SfParams {
    std::uint64_t m = 0;   // messages gathered per counting phase
    std::uint64_t T = 0;   // rounds per counting phase, ceil(m/h)
    std::uint64_t w = 0;   // short-sub-phase message budget, ceil(100/(1-2*delta)^2)
    std::uint64_t L = 0;   // number of short sub-phases, ceil(10*log n)
    double c1 = 1.0;
    double delta = 0.0;
    std::uint64_t h = 1;
    bool strictM = false;  // count only the first m messages of each phase

    std::uint64_t shortSubPhaseRounds() const { return (w + h - 1) / h; }
    std::uint64_t longSubPhaseRounds() const { return (m + h - 1) / h; }
    std::uint64_t boostRounds() const { return L * shortSubPhaseRounds() + longSubPhaseRounds(); }
    std::uint64_t scheduleRounds() const { return 2 * T + boostRounds(); }
    /// First 1-based round whose stats row carries real opinions.
    std::uint64_t opinionValidFrom() const { return 2 * T; }
    bool boostWithinTwoPhases() const { return boostRounds() <= 2 * T; }
};

/// Derives m from the sample-count formula (or accepts an explicit m via
/// mOverride > 0), then fills in the schedule. n is real-valued so the
/// formula can be evaluated at non-integer points.
/// Rejects delta >= 1/2.
SfParams sfParams(double n, std::uint64_t h, double delta, std::int64_t s0, std::int64_t s1,
                  double c1 = 1.0, std::uint64_t mOverride = 0, double logBase = 0.0);

enum class SfPhase : std::uint8_t { Phase0, Phase1, Boost, Done };

struct SfAgentState {
    bool isSource = false;
    std::uint8_t preference = 0;
    SfPhase phase = SfPhase::Phase0;
    std::uint64_t counter0 = 0;
    std::uint64_t counter1 = 0;
    std::uint64_t phaseMessages = 0;  // messages seen in the current counting phase
    std::uint32_t phaseRounds = 0;    // rounds elapsed in the current counting phase
    std::uint32_t boostCount0 = 0;    // sub-phase memory, kept as counts
    std::uint32_t boostCount1 = 0;
    std::uint32_t subPhase = 0;       // 1..L short, L+1 long
    std::uint8_t weakOpinion = 0;
    std::uint8_t opinion = 0;
};

std::uint8_t sfDisplay(const SfAgentState& s);

/// Processes one round of h received bits; returns true when the agent
/// performed an update (weak-opinion computation or sub-phase majority).
bool sfReceive(SfAgentState& s, std::span<const std::uint8_t> messages, const SfParams& p,
               RngStream& rng);

struct AgentOverride;

/// Protocol adapter for the round engine.
struct SfProtocol {
    using Params = SfParams;
    using State = SfAgentState;
    static constexpr int kAlphabet = 2;

    static State initial(bool isSource, std::uint8_t preference, const Params&, RngStream&) {
        State s;
        s.isSource = isSource;
        s.preference = preference;
        s.opinion = isSource ? preference : 0;
        return s;
    }
    static std::uint8_t display(const State& s) { return sfDisplay(s); }
    static bool receive(State& s, std::span<const std::uint8_t> messages, const Params& p,
                        RngStream& rng) {
        return sfReceive(s, messages, p, rng);
    }
    static bool opinion(const State& s) { return s.opinion != 0; }
    static bool weakOpinion(const State& s) { return s.weakOpinion != 0; }

    static void checkParams(const Params& p, std::uint64_t h);
    static std::uint64_t fixedScheduleRounds(const Params& p, std::uint64_t) {
        return p.scheduleRounds();
    }
    static std::uint64_t opinionValidFrom(const Params& p) { return p.opinionValidFrom(); }
    static void applyOverride(State& s, const AgentOverride& o);
};

} // namespace noisypull
