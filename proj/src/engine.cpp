#include "noisypull/engine.hpp"

#include <json.hpp>

#include "noisypull/sf.hpp"
#include "noisypull/ssf.hpp"

namespace noisypull {

void validatePopulation(const PopulationConfig& cfg, int alphabet) {
    if (cfg.n < 1) throw ConfigError("population must have n >= 1");
    if (cfg.h < 1) throw ConfigError("sample size must be h >= 1");
    if (cfg.s0 < 0 || cfg.s1 < 0) throw ConfigError("source counts must be non-negative");
    if (cfg.s0 + cfg.s1 > static_cast<std::int64_t>(cfg.n))
        throw ConfigError("source counts exceed population");
    if (!cfg.exploratory) {
        if (cfg.bias() < 1)
            throw ConfigError("requires bias |s1-s0| >= 1 (set exploratory to force)");
        if (4 * cfg.s0 > static_cast<std::int64_t>(cfg.n) ||
            4 * cfg.s1 > static_cast<std::int64_t>(cfg.n))
            throw ConfigError("requires s0, s1 <= n/4 (set exploratory to force)");
    }
    if (cfg.noise.d() != alphabet)
        throw ConfigError("noise matrix dimension does not match the protocol alphabet");
    if (!cfg.noise.isStochastic()) throw ConfigError("noise matrix is not row-stochastic");
    if (cfg.artificialNoise) {
        if (cfg.artificialNoise->d() != alphabet)
            throw ConfigError("artificial noise dimension does not match the protocol alphabet");
        if (!cfg.artificialNoise->isStochastic())
            throw ConfigError("artificial noise matrix is not row-stochastic");
    }
    if (cfg.convergenceWindow && *cfg.convergenceWindow == 0)
        throw ConfigError("convergence window must be >= 1 when given");
}

std::optional<std::uint64_t> analyzeConvergence(const std::vector<RoundStats>& rows,
                                                std::uint64_t n, int correctOpinion,
                                                std::uint64_t window, std::uint64_t scanFrom) {
    if (window == 0) throw ConfigError("convergence window must be >= 1");
    const std::uint32_t target = correctOpinion ? static_cast<std::uint32_t>(n) : 0;
    std::uint64_t streak = 0;
    for (const RoundStats& row : rows) {
        if (row.opinionOnes == target && row.round >= scanFrom)
            ++streak;
        else
            streak = 0;
        if (streak == window) return row.round - window + 1;
    }
    return std::nullopt;
}

AdversarySpec adversaryFromJson(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("agents") || !j.at("agents").is_array())
        throw ConfigError("adversary spec needs an \"agents\" array");
    AdversarySpec spec;
    for (const auto& entry : j.at("agents")) {
        if (!entry.is_object()) throw ConfigError("adversary agent entry must be an object");
        for (const auto& [key, value] : entry.items()) {
            (void)value;
            if (key == "preference" || key == "isSource" || key == "is_source")
                throw ConfigError("adversary may not touch source membership or preferences");
            if (key != "index" && key != "opinion" && key != "weakOpinion" && key != "memory")
                throw ConfigError("unknown adversary field: " + key);
        }
        AgentOverride o;
        if (!entry.contains("index")) throw ConfigError("adversary agent entry needs an index");
        o.index = entry.at("index").get<std::uint64_t>();
        if (entry.contains("opinion")) o.opinion = entry.at("opinion").get<int>();
        if (entry.contains("weakOpinion")) o.weakOpinion = entry.at("weakOpinion").get<int>();
        if (entry.contains("memory")) {
            const auto& mem = entry.at("memory");
            if (!mem.is_array() || mem.size() != 4)
                throw ConfigError("memory override must be a count vector of length 4");
            std::array<std::uint32_t, 4> counts{};
            for (int k = 0; k < 4; ++k) counts[k] = mem.at(k).get<std::uint32_t>();
            o.memory = counts;
        }
        spec.agents.push_back(o);
    }
    return spec;
}

namespace {

int requireBit(int v, const char* what) {
    if (v != 0 && v != 1) throw ConfigError(std::string(what) + " override must be 0 or 1");
    return v;
}

} // namespace

void SfProtocol::checkParams(const Params& p, std::uint64_t h) {
    if (p.h != h) throw ConfigError("protocol parameters were derived for a different h");
    if (p.m < 1 || p.T < 1) throw ConfigError("protocol parameters need m >= 1");
}

void SfProtocol::applyOverride(State& s, const AgentOverride& o) {
    if (o.memory)
        throw ConfigError("memory overrides only exist for the 4-symbol protocol");
    if (o.opinion) s.opinion = static_cast<std::uint8_t>(requireBit(*o.opinion, "opinion"));
    if (o.weakOpinion)
        s.weakOpinion = static_cast<std::uint8_t>(requireBit(*o.weakOpinion, "weak-opinion"));
}

void SsfProtocol::applyOverride(State& s, const AgentOverride& o) {
    if (o.opinion) s.opinion = static_cast<std::uint8_t>(requireBit(*o.opinion, "opinion"));
    if (o.weakOpinion)
        s.weakOpinion = static_cast<std::uint8_t>(requireBit(*o.weakOpinion, "weak-opinion"));
    if (o.memory) {
        s.memory = *o.memory;
        std::uint64_t total = 0;
        for (const std::uint32_t c : s.memory) total += c;
        s.adversarialTagged = static_cast<std::uint32_t>(total);
    }
}

} // namespace noisypull
