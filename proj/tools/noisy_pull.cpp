// Command-line front end: single simulations, parameter sweeps, lemma
// verification, noise-matrix checks, and weak-opinion bias estimation.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisypull/experiment.hpp"
#include "noisypull/trace_io.hpp"

namespace {

using namespace noisypull;

struct CommonFlags {
    std::string configPath;
    std::string outPath;
    std::uint64_t seed = 0;
    bool seedSet = false;
    std::uint64_t trials = 0;
    std::uint64_t m = 0;
    double c1 = 0.0;
    bool c1Set = false;
    std::string logBase;
    bool strictM = false;
};

ExperimentConfig loadConfig(const CommonFlags& f) {
    if (f.configPath.empty()) throw ConfigError("missing --config <path>");
    ExperimentConfig cfg = experimentFromJson(readFile(f.configPath));
    if (f.seedSet) cfg.seed = f.seed;
    if (f.trials > 0) cfg.trials = f.trials;
    if (f.m > 0) cfg.mOverride = f.m;
    if (f.c1Set) cfg.c1 = f.c1;
    if (!f.logBase.empty()) {
        if (f.logBase == "e")
            cfg.logBase = 0.0;
        else if (f.logBase == "2")
            cfg.logBase = 2.0;
        else
            throw ConfigError("--log-base must be e or 2");
    }
    if (f.strictM) cfg.strictM = true;
    return cfg;
}

void addCommon(CLI::App* cmd, CommonFlags& f, bool needsConfig) {
    if (needsConfig) cmd->add_option("--config", f.configPath, "config JSON path");
    cmd->add_option("--out", f.outPath, "output path");
    cmd->add_option("--seed", f.seed, "master seed")->each([&f](const std::string&) {
        f.seedSet = true;
    });
    cmd->add_option("--trials", f.trials, "number of trials");
    cmd->add_option("--m", f.m, "explicit per-phase/memory message count");
    cmd->add_option("--c1", f.c1, "scale constant for derived m")->each([&f](const std::string&) {
        f.c1Set = true;
    });
    cmd->add_option("--log-base", f.logBase, "log base for formulas: e or 2");
    cmd->add_flag("--strict-m", f.strictM, "count only the first m messages per phase");
}

int runSimulate(const CommonFlags& f) {
    ExperimentConfig cfg = loadConfig(f);
    const std::string outDir = f.outPath.empty() ? "out" : f.outPath;
    const SimulateSummary s = simulate(cfg, outDir);
    std::printf("trials=%llu converged=%llu successRate=%.6g\n",
                static_cast<unsigned long long>(s.trials),
                static_cast<unsigned long long>(s.converged), s.successRate);
    if (s.medianRound)
        std::printf("convergenceRounds min=%llu median=%llu p95=%llu\n",
                    static_cast<unsigned long long>(*s.minRound),
                    static_cast<unsigned long long>(*s.medianRound),
                    static_cast<unsigned long long>(*s.p95Round));
    std::printf("wrote %s/summary.json\n", outDir.c_str());
    return 0;
}

int runSweep(const CommonFlags& f) {
    ExperimentConfig cfg = loadConfig(f);
    if (cfg.sweep.empty()) throw ConfigError("sweep mode needs a \"sweep\" block with grids");
    const std::string csv = sweepCsv(cfg);
    if (f.outPath.empty())
        std::fputs(csv.c_str(), stdout);
    else {
        writeFile(f.outPath, csv);
        std::printf("wrote %s\n", f.outPath.c_str());
    }
    return 0;
}

int runVerifyNoise(const std::string& matrixPath, double delta) {
    const NoiseMatrix n = noiseMatrixFromJson(readFile(matrixPath));
    const NoiseClassification cls = classify(n, delta);
    nlohmann::json out;
    out["d"] = n.d();
    out["delta"] = delta;
    out["lowerBounded"] = cls.lowerBounded;
    out["upperBounded"] = cls.upperBounded;
    out["uniform"] = cls.uniform;
    if (cls.upperBounded && delta < 1.0 / n.d()) {
        const UniformizationResult u = uniformize(n, delta);
        out["deltaPrime"] = u.deltaPrime;
        out["artificialNoise"] = nlohmann::json::parse(noiseMatrixToJson(u.artificialNoise));
        const SquareMatrix inv = invert(n, delta);
        out["inverseInfinityNorm"] = infinityNorm(inv);
        out["inverseNormBound"] = (n.d() - 1) / (1.0 - n.d() * delta);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int runEstimateBias(const CommonFlags& f, const ExperimentConfig& base, std::uint64_t runs) {
    (void)f;
    const BiasEstimate est = estimateWeakOpinionBias(base, runs);
    std::printf("evalRound=%llu agents=%llu mcFrequency=%.6f\n",
                static_cast<unsigned long long>(est.evalRound),
                static_cast<unsigned long long>(est.agents), est.mcFrequency);
    if (est.oracleAvailable) {
        std::printf("oracle=%.6f sigma=%.6f |mc-oracle|=%.3f sigma units\n", est.oracle,
                    est.sigma, std::abs(est.mcFrequency - est.oracle) / est.sigma);
    } else {
        std::printf("oracle unavailable: m exceeds the exact-DP guard (%lld)\n",
                    static_cast<long long>(oracle::kMaxDpTrials));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy-pull: round-based noisy PULL(h) protocol simulator"};
    app.require_subcommand(1);

    CommonFlags simFlags, sweepFlags, biasFlags, lemmaFlags;

    CLI::App* cmdSim = app.add_subcommand("simulate", "run seeded trials from a config file");
    addCommon(cmdSim, simFlags, true);

    CLI::App* cmdSweep = app.add_subcommand("sweep", "cartesian parameter sweep");
    addCommon(cmdSweep, sweepFlags, true);

    std::string matrixPath;
    double verifyDelta = 0.0;
    CLI::App* cmdNoise =
        app.add_subcommand("verify-noise", "classify / invert / uniformize a noise matrix");
    cmdNoise->add_option("--matrix", matrixPath, "matrix JSON path")->required();
    cmdNoise->add_option("--delta", verifyDelta, "declared noise level")->required();

    CLI::App* cmdLemmas = app.add_subcommand("verify-lemmas", "emit lemma-check CSV");
    addCommon(cmdLemmas, lemmaFlags, false);

    CLI::App* cmdBias =
        app.add_subcommand("estimate-bias", "Monte-Carlo weak-opinion bias vs exact oracle");
    addCommon(cmdBias, biasFlags, true);
    std::uint64_t biasRuns = 20;
    cmdBias->add_option("--runs", biasRuns, "independent populations to pool");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmdSim->parsed()) return runSimulate(simFlags);
        if (cmdSweep->parsed()) return runSweep(sweepFlags);
        if (cmdNoise->parsed()) return runVerifyNoise(matrixPath, verifyDelta);
        if (cmdLemmas->parsed()) {
            const std::string csv = noisypull::verifyLemmasCsv();
            if (lemmaFlags.outPath.empty())
                std::fputs(csv.c_str(), stdout);
            else {
                noisypull::writeFile(lemmaFlags.outPath, csv);
                std::printf("wrote %s\n", lemmaFlags.outPath.c_str());
            }
            return 0;
        }
        if (cmdBias->parsed()) {
            const ExperimentConfig cfg = loadConfig(biasFlags);
            return runEstimateBias(biasFlags, cfg, biasRuns);
        }
    } catch (const noisypull::ContractViolation& e) {
        std::fprintf(stderr, "contract violation: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
