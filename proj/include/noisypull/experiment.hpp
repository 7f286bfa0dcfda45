#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisypull/engine.hpp"
#include "noisypull/oracle.hpp"
#include "noisypull/sf.hpp"
#include "noisypull/ssf.hpp"

namespace noisypull {

/// One fully resolved run setup: population, protocol and its parameters,
/// plus the effective uniform noise level the protocol formulas used.
struct ResolvedRun {
    Protocol protocol = Protocol::SF;
    PopulationConfig population;
    SfParams sf;
    SsfParams ssf;
    double delta = 0.0;           // declared noise level
    double effectiveDelta = 0.0;  // after uniformization (== delta without it)
    bool uniformized = false;
    bool exactOracleComparable = false;  // memory/phase counts land exactly on m

    std::uint64_t m() const { return protocol == Protocol::SF ? sf.m : ssf.m; }
    std::uint64_t cadence() const { return (m() + population.h - 1) / population.h; }
    std::string configJson() const;  // canonical echo for output files
};

/// Inputs as given in a config file or on the command line.
struct ExperimentConfig {
    Protocol protocol = Protocol::SF;
    std::uint64_t n = 0;
    std::uint64_t h = 1;
    std::int64_t s0 = 0;
    std::int64_t s1 = 0;
    double delta = 0.0;
    std::optional<NoiseMatrix> noise;
    bool uniformize = false;
    std::uint64_t mOverride = 0;
    double c1 = 1.0;
    double logBase = 0.0;  // 0 = natural log
    bool strictM = false;
    std::uint64_t seed = 0;
    std::uint64_t trials = 1;
    std::optional<std::uint64_t> maxRounds;
    std::optional<std::uint64_t> convergenceWindow;
    bool exploratory = false;
    std::optional<AdversarySpec> adversary;
    ExecutionMode mode = ExecutionMode::Serial;

    struct Grids {
        std::vector<std::uint64_t> n, h, m;
        std::vector<double> delta;
        std::vector<std::int64_t> s0, s1;
        bool empty() const {
            return n.empty() && h.empty() && m.empty() && delta.empty() && s0.empty() &&
                   s1.empty();
        }
    } sweep;
};

ExperimentConfig experimentFromJson(const std::string& text);

/// Validates, builds the noise matrices (uniform auto-construction or
/// uniformization of a non-uniform channel) and the protocol parameters.
ResolvedRun resolve(const ExperimentConfig& cfg);

Trace runOne(const ResolvedRun& run, std::uint64_t seed, ExecutionMode mode);

struct SimulateSummary {
    std::uint64_t trials = 0;
    std::uint64_t converged = 0;
    double successRate = 0.0;
    std::optional<std::uint64_t> minRound, medianRound, p95Round;
};

/// Runs `trials` seeded trials (seed, seed+1, ...) in a worker pool, writes
/// trial_###.csv files plus summary.json under outDir.
SimulateSummary simulate(const ExperimentConfig& cfg, const std::string& outDir);

/// Cartesian sweep over the configured grids; returns the results CSV.
std::string sweepCsv(const ExperimentConfig& cfg);

struct BiasEstimate {
    double mcFrequency = 0.0;    // fraction of correct weak opinions
    std::uint64_t agents = 0;    // total weak opinions sampled
    double oracle = 0.0;         // exact probability (when within the DP guard)
    bool oracleAvailable = false;
    double sigma = 0.0;          // binomial std dev of the MC estimate
    std::uint64_t evalRound = 0;
};

/// Monte-Carlo weak-opinion correctness at the first post-warmup point
/// (two full update cadences), pooled over `runs` populations, against the
/// exact oracle.
BiasEstimate estimateWeakOpinionBias(const ExperimentConfig& cfg, std::uint64_t runs);

/// CSV of (lemma, parameters, lhs, rhs, pass) rows over fixed grids.
std::string verifyLemmasCsv();

} // namespace noisypull
