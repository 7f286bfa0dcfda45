#pragma once

#include <cstdint>

namespace noisypull {

// Round index used for draws made during population initialization,
// before round 0 runs.
inline constexpr std::uint64_t kInitRound = ~std::uint64_t{0};

namespace detail {

// Stafford variant 13 of the splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

} // namespace detail

/// Counter-based random stream keyed by (seed, streamId, round).
///
/// Every (agent, round) pair gets its own stream, so draws made for one
/// agent never depend on how many draws other agents made. This is what
/// makes parallel and serial execution of a round bit-identical.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t streamId, std::uint64_t round)
        : state_(detail::mix64(detail::mix64(seed ^ detail::kGolden * (streamId + 1)) ^
                               detail::kGolden * (round + 1))) {}

    std::uint64_t next() {
        const std::uint64_t v = detail::mix64(state_ + (counter_ + 1) * detail::kGolden);
        ++counter_;
        return v;
    }

    /// Uniform double in [0, 1).
    double nextDouble() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Unbiased (multiply-shift with rejection).
    std::uint64_t nextBelow(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool fairCoin() { return (next() >> 63) != 0; }

    /// Number of raw 64-bit values consumed so far.
    std::uint64_t drawCount() const { return counter_; }

private:
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

} // namespace noisypull
