#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "noisypull/noise.hpp"
#include "noisypull/rng.hpp"

namespace noisypull {

/// Config/domain problem (bad file, invalid parameter combination).
/// CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Protocol { SF, SSF };
enum class ExecutionMode { Serial, Parallel };

struct PopulationConfig {
    std::uint64_t n = 0;
    std::uint64_t h = 1;
    std::int64_t s0 = 0;
    std::int64_t s1 = 0;
    NoiseMatrix noise;
    std::optional<NoiseMatrix> artificialNoise;  // applied after channel noise
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> maxRounds;          // absent: protocol default
    std::optional<std::uint64_t> convergenceWindow;  // absent: 10 * ceil(m/h)
    bool exploratory = false;  // permit s = 0, oversized source sets, adversarial SF
    ExecutionMode mode = ExecutionMode::Serial;

    std::int64_t bias() const { return s1 > s0 ? s1 - s0 : s0 - s1; }
};

struct RoundStats {
    std::uint64_t round = 0;  // 1-based
    std::uint32_t opinionOnes = 0;
    std::uint32_t weakOnes = 0;
    std::uint32_t updatesPerformed = 0;
};

struct Trace {
    std::vector<RoundStats> perRound;
    std::optional<std::uint64_t> convergedAt;
    int correctOpinion = 1;
};

/// Round-0 state overrides. Source membership and preferences are not
/// representable here and therefore cannot be corrupted.
struct AgentOverride {
    std::uint64_t index = 0;
    std::optional<int> opinion;
    std::optional<int> weakOpinion;
    std::optional<std::array<std::uint32_t, 4>> memory;  // 4-symbol multiset counts
};

struct AdversarySpec {
    std::vector<AgentOverride> agents;
};

AdversarySpec adversaryFromJson(const std::string& text);

/// First 1-based round r (>= scanFrom) such that rounds r .. r+window-1 all
/// have every opinion equal to correct.
std::optional<std::uint64_t> analyzeConvergence(const std::vector<RoundStats>& rows,
                                                std::uint64_t n, int correctOpinion,
                                                std::uint64_t window, std::uint64_t scanFrom);

void validatePopulation(const PopulationConfig& cfg, int alphabet);

/// Executes the round loop for a protocol P (see SfProtocol / SsfProtocol):
/// snapshot displays, sample h agents per agent with replacement, pass each
/// observation through the channel (and optional artificial) noise, then
/// invoke each agent's update once.
///
/// Each (agent, round) pair draws from its own counter-based stream, so the
/// serial reference kernel and the OpenMP kernel produce bit-identical
/// traces; a state is owned by exactly one runner.
template <class P>
class Runner {
public:
    Runner(const PopulationConfig& cfg, const typename P::Params& params,
           const std::vector<std::uint64_t>* streamPermutation = nullptr)
        : cfg_(cfg), params_(params), perm_(streamPermutation) {
        validatePopulation(cfg_, P::kAlphabet);
        P::checkParams(params_, cfg_.h);
        if (perm_ && perm_->size() != cfg_.n)
            throw ConfigError("stream permutation size must equal n");
        correct_ = cfg_.s1 > cfg_.s0 ? 1 : 0;
        agents_.reserve(cfg_.n);
        for (std::uint64_t i = 0; i < cfg_.n; ++i) {
            const bool isSource = static_cast<std::int64_t>(i) < cfg_.s0 + cfg_.s1;
            const std::uint8_t pref = static_cast<std::int64_t>(i) < cfg_.s1 ? 1 : 0;
            RngStream rng(cfg_.seed, streamId(i), kInitRound);
            agents_.push_back(P::initial(isSource, isSource ? pref : 0, params_, rng));
        }
        displays_.assign(cfg_.n, 0);
    }

    void applyAdversary(const AdversarySpec& adv) {
        if (roundsRun_ != 0)
            throw ConfigError("adversarial overrides apply at round 0 only");
        if constexpr (P::kAlphabet == 2) {
            if (!cfg_.exploratory)
                throw ConfigError(
                    "adversarial start requires the self-stabilizing protocol "
                    "(set exploratory to force it)");
        }
        for (const AgentOverride& o : adv.agents) {
            if (o.index >= cfg_.n) throw ConfigError("override index out of range");
            P::applyOverride(agents_[o.index], o);
        }
    }

    RoundStats step() {
        const std::uint64_t round = roundsRun_;
        for (std::uint64_t i = 0; i < cfg_.n; ++i) displays_[i] = P::display(agents_[i]);

        std::uint32_t updates = 0;
        bool parallel = cfg_.mode == ExecutionMode::Parallel;
#ifndef _OPENMP
        parallel = false;
#endif
        if (parallel)
            updates = deliverParallel(round);
        else
            updates = deliverSerial(round);

        RoundStats stats;
        stats.round = ++roundsRun_;
        stats.updatesPerformed = updates;
        for (const auto& a : agents_) {
            stats.opinionOnes += P::opinion(a) ? 1 : 0;
            stats.weakOnes += P::weakOpinion(a) ? 1 : 0;
        }
        return stats;
    }

    /// Runs the full schedule: a fixed-schedule protocol runs to schedule +
    /// window (capped by maxRounds); otherwise rounds run until the
    /// convergence window is satisfied or maxRounds is hit.
    Trace run() {
        const std::uint64_t window = convergenceWindow();
        const std::uint64_t schedule = P::fixedScheduleRounds(params_, cfg_.h);
        std::uint64_t total;
        if (schedule > 0) {
            total = schedule + window;
            if (cfg_.maxRounds && *cfg_.maxRounds < total) total = *cfg_.maxRounds;
        } else {
            total = cfg_.maxRounds ? *cfg_.maxRounds : 4 * updateCadence() + window;
        }

        Trace trace;
        trace.correctOpinion = correct_;
        trace.perRound.reserve(total);
        const std::uint64_t scanFrom = P::opinionValidFrom(params_);
        const std::uint32_t target = correct_ ? static_cast<std::uint32_t>(cfg_.n) : 0;
        std::uint64_t streak = 0;
        for (std::uint64_t r = 0; r < total; ++r) {
            const RoundStats stats = step();
            trace.perRound.push_back(stats);
            if (stats.opinionOnes == target && stats.round >= scanFrom)
                ++streak;
            else
                streak = 0;
            if (streak == window && !trace.convergedAt) {
                trace.convergedAt = stats.round - window + 1;
                if (schedule == 0) break;  // fixed schedules run to completion
            }
        }
        return trace;
    }

    std::uint64_t roundsRun() const { return roundsRun_; }
    int correctOpinion() const { return correct_; }
    std::uint64_t updateCadence() const { return (params_.m + cfg_.h - 1) / cfg_.h; }
    std::uint64_t convergenceWindow() const {
        return cfg_.convergenceWindow ? *cfg_.convergenceWindow : 10 * updateCadence();
    }
    const std::vector<typename P::State>& agents() const { return agents_; }
    const std::vector<std::uint8_t>& displays() const { return displays_; }
    const typename P::Params& params() const { return params_; }
    const PopulationConfig& config() const { return cfg_; }

private:
    std::uint64_t streamId(std::uint64_t i) const { return perm_ ? (*perm_)[i] : i; }

    void deliverOne(std::uint64_t i, std::uint64_t round, std::vector<std::uint64_t>& idx,
                    std::vector<std::uint8_t>& received, std::uint32_t& updates) {
        RngStream rng(cfg_.seed, streamId(i), round);
        for (std::uint64_t l = 0; l < cfg_.h; ++l) idx[l] = rng.nextBelow(cfg_.n);
        for (std::uint64_t l = 0; l < cfg_.h; ++l) {
            int sym = applyNoise(cfg_.noise, displays_[idx[l]], rng);
            if (cfg_.artificialNoise) sym = applyNoise(*cfg_.artificialNoise, sym, rng);
            received[l] = static_cast<std::uint8_t>(sym);
        }
        if (P::receive(agents_[i], received, params_, rng)) ++updates;
    }

    // Reference kernel: one plain pass over the population.
    std::uint32_t deliverSerial(std::uint64_t round) {
        std::uint32_t updates = 0;
        std::vector<std::uint64_t> idx(cfg_.h);
        std::vector<std::uint8_t> received(cfg_.h);
        for (std::uint64_t i = 0; i < cfg_.n; ++i)
            deliverOne(i, round, idx, received, updates);
        return updates;
    }

    std::uint32_t deliverParallel(std::uint64_t round) {
        std::uint32_t updates = 0;
#ifdef _OPENMP
#pragma omp parallel reduction(+ : updates)
        {
            std::vector<std::uint64_t> idx(cfg_.h);
            std::vector<std::uint8_t> received(cfg_.h);
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(cfg_.n); ++i)
                deliverOne(static_cast<std::uint64_t>(i), round, idx, received, updates);
        }
#else
        updates = deliverSerial(round);
#endif
        return updates;
    }

    PopulationConfig cfg_;
    typename P::Params params_;
    const std::vector<std::uint64_t>* perm_ = nullptr;
    std::vector<typename P::State> agents_;
    std::vector<std::uint8_t> displays_;
    std::uint64_t roundsRun_ = 0;
    int correct_ = 1;
};

} // namespace noisypull
