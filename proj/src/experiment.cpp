#include "noisypull/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "noisypull/trace_io.hpp"

namespace noisypull {

namespace {

std::string fmtDouble(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

Protocol protocolFromString(const std::string& s) {
    if (s == "sf" || s == "SF") return Protocol::SF;
    if (s == "ssf" || s == "SSF") return Protocol::SSF;
    throw ConfigError("unknown protocol: " + s);
}

const char* protocolName(Protocol p) { return p == Protocol::SF ? "sf" : "ssf"; }

} // namespace

ExperimentConfig experimentFromJson(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig cfg;
    try {
        cfg.protocol = protocolFromString(j.value("protocol", std::string("sf")));
        cfg.n = j.value("n", std::uint64_t{0});
        cfg.h = j.value("h", std::uint64_t{1});
        cfg.s0 = j.value("s0", std::int64_t{0});
        cfg.s1 = j.value("s1", std::int64_t{0});
        cfg.delta = j.value("delta", 0.0);
        if (j.contains("noise")) cfg.noise = noiseMatrixFromJson(j.at("noise").dump());
        cfg.uniformize = j.value("uniformize", false);
        cfg.mOverride = j.value("m", std::uint64_t{0});
        cfg.c1 = j.value("c1", 1.0);
        if (j.contains("logBase")) {
            const auto& lb = j.at("logBase");
            if (lb.is_string()) {
                const std::string s = lb.get<std::string>();
                if (s == "e")
                    cfg.logBase = 0.0;
                else if (s == "2")
                    cfg.logBase = 2.0;
                else
                    throw ConfigError("logBase must be \"e\" or \"2\"");
            } else {
                cfg.logBase = lb.get<double>();
            }
        }
        cfg.strictM = j.value("strictM", false);
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.trials = j.value("trials", std::uint64_t{1});
        if (j.contains("maxRounds")) cfg.maxRounds = j.at("maxRounds").get<std::uint64_t>();
        if (j.contains("convergenceWindow"))
            cfg.convergenceWindow = j.at("convergenceWindow").get<std::uint64_t>();
        cfg.exploratory = j.value("exploratory", false);
        if (j.contains("adversary")) cfg.adversary = adversaryFromJson(j.at("adversary").dump());
        if (j.contains("parallel"))
            cfg.mode = j.at("parallel").get<bool>() ? ExecutionMode::Parallel
                                                    : ExecutionMode::Serial;
        if (j.contains("sweep")) {
            const auto& sw = j.at("sweep");
            if (sw.contains("n")) cfg.sweep.n = sw.at("n").get<std::vector<std::uint64_t>>();
            if (sw.contains("h")) cfg.sweep.h = sw.at("h").get<std::vector<std::uint64_t>>();
            if (sw.contains("m")) cfg.sweep.m = sw.at("m").get<std::vector<std::uint64_t>>();
            if (sw.contains("delta")) cfg.sweep.delta = sw.at("delta").get<std::vector<double>>();
            if (sw.contains("s0")) cfg.sweep.s0 = sw.at("s0").get<std::vector<std::int64_t>>();
            if (sw.contains("s1")) cfg.sweep.s1 = sw.at("s1").get<std::vector<std::int64_t>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    }
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    return cfg;
}

ResolvedRun resolve(const ExperimentConfig& cfg) {
    ResolvedRun run;
    run.protocol = cfg.protocol;
    run.delta = cfg.delta;
    const int alphabet = cfg.protocol == Protocol::SF ? 2 : 4;

    PopulationConfig& pop = run.population;
    pop.n = cfg.n;
    pop.h = cfg.h;
    pop.s0 = cfg.s0;
    pop.s1 = cfg.s1;
    pop.seed = cfg.seed;
    pop.maxRounds = cfg.maxRounds;
    pop.convergenceWindow = cfg.convergenceWindow;
    pop.exploratory = cfg.exploratory;
    pop.mode = cfg.mode;

    double effectiveDelta = cfg.delta;
    if (cfg.noise) {
        if (cfg.noise->d() != alphabet)
            throw ConfigError("noise matrix dimension does not match the protocol alphabet");
        pop.noise = *cfg.noise;
        const NoiseClassification cls = classify(pop.noise, cfg.delta);
        if (cfg.uniformize) {
            if (!cls.upperBounded)
                throw ConfigError(
                    "uniformization requires a delta-upper-bounded noise matrix");
            UniformizationResult u = uniformize(pop.noise, cfg.delta);
            pop.artificialNoise = u.artificialNoise;
            effectiveDelta = u.deltaPrime;
            run.uniformized = true;
        }
    } else {
        // No matrix given: build the delta-uniform one for the alphabet.
        pop.noise = NoiseMatrix::uniform(alphabet, cfg.delta);
    }
    run.effectiveDelta = effectiveDelta;

    if (cfg.protocol == Protocol::SF) {
        run.sf = sfParams(static_cast<double>(cfg.n), cfg.h, effectiveDelta, cfg.s0, cfg.s1,
                          cfg.c1, cfg.mOverride, cfg.logBase);
        run.sf.strictM = cfg.strictM;
        run.exactOracleComparable = cfg.strictM;
    } else {
        run.ssf = ssfParams(static_cast<double>(cfg.n), effectiveDelta, cfg.c1, cfg.mOverride,
                            cfg.logBase);
        run.exactOracleComparable = run.ssf.m % cfg.h == 0;
    }
    return run;
}

std::string ResolvedRun::configJson() const {
    nlohmann::json j;
    j["protocol"] = protocolName(protocol);
    j["n"] = population.n;
    j["h"] = population.h;
    j["s0"] = population.s0;
    j["s1"] = population.s1;
    j["delta"] = delta;
    j["effectiveDelta"] = effectiveDelta;
    j["uniformized"] = uniformized;
    j["m"] = m();
    if (protocol == Protocol::SF) {
        j["T"] = sf.T;
        j["w"] = sf.w;
        j["L"] = sf.L;
        j["strictM"] = sf.strictM;
        j["scheduleRounds"] = sf.scheduleRounds();
    }
    j["seed"] = population.seed;
    if (population.maxRounds) j["maxRounds"] = *population.maxRounds;
    if (population.convergenceWindow) j["convergenceWindow"] = *population.convergenceWindow;
    j["exploratory"] = population.exploratory;
    return j.dump();
}

Trace runOne(const ResolvedRun& run, std::uint64_t seed, ExecutionMode mode) {
    PopulationConfig pop = run.population;
    pop.seed = seed;
    pop.mode = mode;
    if (run.protocol == Protocol::SF) {
        Runner<SfProtocol> r(pop, run.sf);
        return r.run();
    }
    Runner<SsfProtocol> r(pop, run.ssf);
    return r.run();
}

namespace {

Trace runOneWithAdversary(const ResolvedRun& run, const std::optional<AdversarySpec>& adv,
                          std::uint64_t seed, ExecutionMode mode) {
    if (!adv) return runOne(run, seed, mode);
    PopulationConfig pop = run.population;
    pop.seed = seed;
    pop.mode = mode;
    if (run.protocol == Protocol::SF) {
        Runner<SfProtocol> r(pop, run.sf);
        r.applyAdversary(*adv);
        return r.run();
    }
    Runner<SsfProtocol> r(pop, run.ssf);
    r.applyAdversary(*adv);
    return r.run();
}

struct TrialOutcome {
    Trace trace;
    std::uint64_t seed = 0;
};

std::vector<TrialOutcome> runTrials(const ResolvedRun& run,
                                    const std::optional<AdversarySpec>& adv,
                                    std::uint64_t baseSeed, std::uint64_t trials) {
    std::vector<TrialOutcome> out(trials);
    // Trials fan out across the pool; each engine stays serial inside.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
        const std::uint64_t seed = baseSeed + static_cast<std::uint64_t>(t);
        out[t].seed = seed;
        out[t].trace = runOneWithAdversary(run, adv, seed, ExecutionMode::Serial);
    }
    return out;
}

SimulateSummary summarize(const std::vector<TrialOutcome>& outcomes) {
    SimulateSummary s;
    s.trials = outcomes.size();
    std::vector<std::uint64_t> rounds;
    for (const TrialOutcome& o : outcomes)
        if (o.trace.convergedAt) rounds.push_back(*o.trace.convergedAt);
    s.converged = rounds.size();
    s.successRate = outcomes.empty() ? 0.0
                                     : static_cast<double>(s.converged) /
                                           static_cast<double>(outcomes.size());
    if (!rounds.empty()) {
        std::sort(rounds.begin(), rounds.end());
        s.minRound = rounds.front();
        s.medianRound = rounds[(rounds.size() - 1) / 2];
        const std::size_t p95 =
            static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(rounds.size()))) - 1;
        s.p95Round = rounds[std::min(p95, rounds.size() - 1)];
    }
    return s;
}

} // namespace

SimulateSummary simulate(const ExperimentConfig& cfg, const std::string& outDir) {
    const ResolvedRun run = resolve(cfg);
    std::filesystem::create_directories(outDir);

    const std::vector<TrialOutcome> outcomes =
        runTrials(run, cfg.adversary, cfg.seed, cfg.trials);

    const std::string configJson = run.configJson();
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "trial_%03zu.csv", t);
        writeFile(outDir + "/" + name,
                  traceToCsv(outcomes[t].trace, configJson, outcomes[t].seed));
    }

    const SimulateSummary s = summarize(outcomes);
    nlohmann::json j;
    j["format"] = "noisy-pull v1";
    j["config"] = nlohmann::json::parse(configJson);
    j["seed"] = cfg.seed;
    j["trials"] = s.trials;
    j["successRate"] = s.successRate;
    nlohmann::json cr;
    cr["min"] = s.minRound ? nlohmann::json(*s.minRound) : nlohmann::json(nullptr);
    cr["median"] = s.medianRound ? nlohmann::json(*s.medianRound) : nlohmann::json(nullptr);
    cr["p95"] = s.p95Round ? nlohmann::json(*s.p95Round) : nlohmann::json(nullptr);
    j["convergenceRounds"] = cr;
    writeFile(outDir + "/summary.json", j.dump(2) + "\n");
    return s;
}

std::string sweepCsv(const ExperimentConfig& cfg) {
    auto grid = [](auto configured, auto fallback) {
        using Vec = decltype(configured);
        return configured.empty() ? Vec{fallback} : configured;
    };
    const std::vector<std::uint64_t> ns = grid(cfg.sweep.n, cfg.n);
    const std::vector<std::uint64_t> hs = grid(cfg.sweep.h, cfg.h);
    const std::vector<double> deltas = grid(cfg.sweep.delta, cfg.delta);
    const std::vector<std::int64_t> s1s = grid(cfg.sweep.s1, cfg.s1);
    const std::vector<std::int64_t> s0s = grid(cfg.sweep.s0, cfg.s0);
    const std::vector<std::uint64_t> ms = grid(cfg.sweep.m, cfg.mOverride);

    struct Cell {
        ExperimentConfig cfg;
        std::string error;
        SimulateSummary summary;
    };
    std::vector<Cell> cells;
    for (const auto n : ns)
        for (const auto h : hs)
            for (const auto delta : deltas)
                for (const auto s1 : s1s)
                    for (const auto s0 : s0s)
                        for (const auto m : ms) {
                            Cell c;
                            c.cfg = cfg;
                            c.cfg.n = n;
                            c.cfg.h = h;
                            c.cfg.delta = delta;
                            c.cfg.s1 = s1;
                            c.cfg.s0 = s0;
                            c.cfg.mOverride = m;
                            cells.push_back(std::move(c));
                        }

    for (Cell& c : cells) {
        try {
            const ResolvedRun run = resolve(c.cfg);
            c.summary = summarize(runTrials(run, c.cfg.adversary, c.cfg.seed, c.cfg.trials));
            c.cfg.mOverride = run.m();  // echo the resolved m
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            c.error = msg;
        }
    }

    std::ostringstream out;
    out << "# noisy-pull v1\n";
    out << "# seed " << cfg.seed << "\n";
    out << "protocol,n,h,delta,s1,s0,m,seed,trials,successRate,medianConvergenceRound,error\n";
    for (const Cell& c : cells) {
        out << protocolName(c.cfg.protocol) << ',' << c.cfg.n << ',' << c.cfg.h << ','
            << fmtDouble(c.cfg.delta) << ',' << c.cfg.s1 << ',' << c.cfg.s0 << ','
            << c.cfg.mOverride << ',' << c.cfg.seed << ',' << c.cfg.trials << ',';
        if (c.error.empty()) {
            out << fmtDouble(c.summary.successRate) << ',';
            if (c.summary.medianRound)
                out << *c.summary.medianRound;
            out << ',';
        } else {
            out << ",," << c.error;
        }
        out << '\n';
    }
    return out.str();
}

BiasEstimate estimateWeakOpinionBias(const ExperimentConfig& cfg, std::uint64_t runs) {
    if (runs < 1) throw ConfigError("needs at least one run");
    ExperimentConfig local = cfg;
    if (local.protocol == Protocol::SF) local.strictM = true;
    const ResolvedRun run = resolve(local);

    BiasEstimate est;
    est.evalRound = 2 * run.cadence();
    const int correct = run.population.s1 > run.population.s0 ? 1 : 0;

    std::uint64_t hits = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : hits)
#endif
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(runs); ++t) {
        PopulationConfig pop = run.population;
        pop.seed = cfg.seed + static_cast<std::uint64_t>(t);
        pop.mode = ExecutionMode::Serial;
        if (run.protocol == Protocol::SF) {
            Runner<SfProtocol> r(pop, run.sf);
            for (std::uint64_t k = 0; k < est.evalRound; ++k) r.step();
            for (const auto& a : r.agents())
                hits += (a.weakOpinion == correct) ? 1 : 0;
        } else {
            Runner<SsfProtocol> r(pop, run.ssf);
            for (std::uint64_t k = 0; k < est.evalRound; ++k) r.step();
            for (const auto& a : r.agents())
                hits += (a.weakOpinion == correct) ? 1 : 0;
        }
    }
    est.agents = runs * run.population.n;
    est.mcFrequency = static_cast<double>(hits) / static_cast<double>(est.agents);

    const std::uint64_t m = run.m();
    if (m <= static_cast<std::uint64_t>(oracle::kMaxDpTrials)) {
        const std::int64_t popN = static_cast<std::int64_t>(run.population.n);
        double p;
        if (run.protocol == Protocol::SF)
            p = oracle::sfWeakOpinionExact(popN, run.effectiveDelta, run.population.s0,
                                           run.population.s1, static_cast<std::int64_t>(m));
        else
            p = oracle::ssfWeakOpinionExact(popN, run.effectiveDelta, run.population.s0,
                                            run.population.s1, static_cast<std::int64_t>(m));
        est.oracle = correct ? p : 1.0 - p;
        est.oracleAvailable = true;
        est.sigma = std::sqrt(est.oracle * (1.0 - est.oracle) /
                              static_cast<double>(est.agents));
    }
    return est;
}

std::string verifyLemmasCsv() {
    std::ostringstream out;
    out << "# noisy-pull v1\n";
    out << "lemma,parameters,lhs,rhs,pass\n";

    // Majority advantage of biased coin sums (coarse grid; the acceptance
    // suite runs the dense one).
    for (std::int64_t m : {1, 2, 3, 5, 10, 20, 50, 100, 200}) {
        for (double theta : {0.0, 0.05, 0.1, 0.25, 0.4, 0.49}) {
            const double lhs = oracle::rademacherAdvantage(m, theta);
            const double rhs = oracle::boostingLowerBound(m, theta);
            out << "majority_advantage,m=" << m << ";theta=" << fmtDouble(theta) << ','
                << fmtDouble(lhs) << ',' << fmtDouble(rhs) << ',' << (lhs >= rhs) << '\n';
        }
    }

    for (std::int64_t n : {1, 2, 5, 10, 50, 100}) {
        for (int k : {1, 10, 50, 100}) {
            const double p = static_cast<double>(k) / (100.0 * static_cast<double>(n));
            const double lhs = oracle::binomialSingleHit(n, p);
            const double rhs = static_cast<double>(n) * p / std::numbers::e;
            out << "single_hit,n=" << n << ";p=" << fmtDouble(p) << ',' << fmtDouble(lhs) << ','
                << fmtDouble(rhs) << ',' << (lhs >= rhs) << '\n';
        }
    }

    // Monotonicity of the achievable uniform level.
    for (int d : {2, 3, 4}) {
        bool increasing = true;
        double prev = fDelta(0.0, d);
        const int grid = 1000;
        for (int i = 1; i <= grid; ++i) {
            const double delta = (1.0 / d - 1e-6) * i / grid;
            const double v = fDelta(delta, d);
            if (v <= prev || v >= 1.0 / d) increasing = false;
            prev = v;
        }
        out << "f_delta_increasing,d=" << d << ",,," << increasing << '\n';
    }

    // Weak-opinion advantage target; reported, not asserted (the closed-form
    // probability needs very large sample counts before it clears the
    // asymptotic target).
    for (std::int64_t n : {100, 1000}) {
        for (double delta : {0.0, 0.1, 0.2}) {
            const auto rep = oracle::checkMCondition(n, 1, delta, 1, 2, 2, 0);
            const std::int64_t m =
                std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(rep.sum)),
                                       oracle::kMaxDpTrials);
            const double lhs = oracle::sfWeakOpinionExact(n, delta, 1, 2, m);
            const double rhs =
                0.5 + 4.0 * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
            out << "weak_opinion_advantage,protocol=sf;n=" << n << ";delta=" << fmtDouble(delta)
                << ";m=" << m << ',' << fmtDouble(lhs) << ',' << fmtDouble(rhs) << ','
                << (lhs >= rhs) << '\n';
        }
        for (double delta : {0.0, 0.05, 0.1}) {
            const auto rep = oracle::checkMCondition(n, 1, delta, 1, 2, 4, 0);
            const std::int64_t m =
                std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(rep.ssfM)),
                                       oracle::kMaxDpTrials);
            const double lhs = oracle::ssfWeakOpinionExact(n, delta, 1, 2, m);
            const double rhs =
                0.5 + 4.0 * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
            out << "weak_opinion_advantage,protocol=ssf;n=" << n << ";delta=" << fmtDouble(delta)
                << ";m=" << m << ',' << fmtDouble(lhs) << ',' << fmtDouble(rhs) << ','
                << (lhs >= rhs) << '\n';
        }
    }
    return out.str();
}

} // namespace noisypull
