// Times the serial reference kernel against the OpenMP kernel on identical
// configurations and checks that the traces are bit-identical.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "noisypull/engine.hpp"
#include "noisypull/sf.hpp"
#include "noisypull/ssf.hpp"

using namespace noisypull;

namespace {

template <class P>
std::pair<double, std::vector<RoundStats>> timeRounds(const PopulationConfig& cfg,
                                                      const typename P::Params& params,
                                                      std::uint64_t rounds) {
    Runner<P> runner(cfg, params);
    std::vector<RoundStats> stats;
    stats.reserve(rounds);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t r = 0; r < rounds; ++r) stats.push_back(runner.step());
    const auto t1 = std::chrono::steady_clock::now();
    return {std::chrono::duration<double>(t1 - t0).count(), std::move(stats)};
}

bool sameStats(const std::vector<RoundStats>& a, const std::vector<RoundStats>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].round != b[i].round || a[i].opinionOnes != b[i].opinionOnes ||
            a[i].weakOnes != b[i].weakOnes || a[i].updatesPerformed != b[i].updatesPerformed)
            return false;
    return true;
}

template <class P>
void benchProtocol(const char* name, PopulationConfig cfg, const typename P::Params& params,
                   std::uint64_t rounds) {
    cfg.mode = ExecutionMode::Serial;
    const auto [serialSec, serialStats] = timeRounds<P>(cfg, params, rounds);
    cfg.mode = ExecutionMode::Parallel;
    const auto [parallelSec, parallelStats] = timeRounds<P>(cfg, params, rounds);

    const bool identical = sameStats(serialStats, parallelStats);
    const double obs = static_cast<double>(cfg.n) * cfg.h * rounds;
    std::printf("%-4s n=%llu h=%llu rounds=%llu | serial %.3fs (%.1fM obs/s) | "
                "parallel %.3fs (%.1fM obs/s) | speedup %.2fx | traces %s\n",
                name, static_cast<unsigned long long>(cfg.n),
                static_cast<unsigned long long>(cfg.h),
                static_cast<unsigned long long>(rounds), serialSec, obs / serialSec / 1e6,
                parallelSec, obs / parallelSec / 1e6, serialSec / parallelSec,
                identical ? "identical" : "DIFFER");
    if (!identical) std::exit(1);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel mode falls back to serial\n");
#endif

    {
        PopulationConfig cfg;
        cfg.n = 20000;
        cfg.h = 10;
        cfg.s1 = 2;
        cfg.s0 = 1;
        cfg.noise = NoiseMatrix::uniform(2, 0.1);
        cfg.seed = 12345;
        const SfParams params = sfParams(static_cast<double>(cfg.n), cfg.h, 0.1, cfg.s0, cfg.s1);
        benchProtocol<SfProtocol>("SF", cfg, params, 200);
    }
    {
        PopulationConfig cfg;
        cfg.n = 20000;
        cfg.h = 10;
        cfg.s1 = 2;
        cfg.s0 = 1;
        cfg.noise = NoiseMatrix::uniform(4, 0.1);
        cfg.seed = 12345;
        const SsfParams params = ssfParams(static_cast<double>(cfg.n), 0.1);
        benchProtocol<SsfProtocol>("SSF", cfg, params, 200);
    }
    return 0;
}
