#pragma once

#include <string>

#include "noisypull/engine.hpp"

namespace noisypull {

/// CSV with `# noisy-pull v1`, config echo and seed as comment lines, then
/// round,opinion_ones,weak_ones,updates_performed.
std::string traceToCsv(const Trace& trace, const std::string& configJson, std::uint64_t seed);

/// Full trace as JSON: config echo, seed, convergedAt, per-round rows.
std::string traceToJsonText(const Trace& trace, const std::string& configJson,
                            std::uint64_t seed);

void writeFile(const std::string& path, const std::string& contents);
std::string readFile(const std::string& path);

} // namespace noisypull
