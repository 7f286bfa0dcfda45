#include "noisypull/trace_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace noisypull {

std::string traceToCsv(const Trace& trace, const std::string& configJson, std::uint64_t seed) {
    std::ostringstream out;
    out << "# noisy-pull v1\n";
    out << "# config " << configJson << "\n";
    out << "# seed " << seed << "\n";
    out << "round,opinion_ones,weak_ones,updates_performed\n";
    for (const RoundStats& row : trace.perRound)
        out << row.round << ',' << row.opinionOnes << ',' << row.weakOnes << ','
            << row.updatesPerformed << '\n';
    return out.str();
}

std::string traceToJsonText(const Trace& trace, const std::string& configJson,
                            std::uint64_t seed) {
    nlohmann::json j;
    j["format"] = "noisy-pull v1";
    j["config"] = nlohmann::json::parse(configJson);
    j["seed"] = seed;
    j["correctOpinion"] = trace.correctOpinion;
    if (trace.convergedAt)
        j["convergedAt"] = *trace.convergedAt;
    else
        j["convergedAt"] = nullptr;
    nlohmann::json rows = nlohmann::json::array();
    for (const RoundStats& row : trace.perRound)
        rows.push_back({row.round, row.opinionOnes, row.weakOnes, row.updatesPerformed});
    j["rounds"] = std::move(rows);
    return j.dump(2) + "\n";
}

void writeFile(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << contents;
    if (!out) throw ConfigError("write failed: " + path);
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace noisypull
