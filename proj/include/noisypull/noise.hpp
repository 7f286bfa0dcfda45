#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisypull/rng.hpp"

namespace noisypull {

/// Numeric postcondition broken (e.g. an artificial-noise entry that the
/// theory guarantees non-negative comes out clearly negative). CLI maps
/// this to exit code 2.
struct ContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kStochEps = 1e-9;   // stochasticity / uniformity tolerance
inline constexpr double kInvertEps = 1e-8;  // inversion residual and norm-bound slack

/// Dense square matrix, row-major.
struct SquareMatrix {
    int d = 0;
    std::vector<double> a;

    SquareMatrix() = default;
    explicit SquareMatrix(int dim) : d(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }

    static SquareMatrix identity(int dim);
};

SquareMatrix multiply(const SquareMatrix& lhs, const SquareMatrix& rhs);

/// max over rows of the sum of absolute entries.
double infinityNorm(const SquareMatrix& m);

/// Row-stochastic noise matrix over an alphabet of size d.
/// entries[sigma][sigma'] = probability of observing sigma' when sigma is displayed.
struct NoiseMatrix {
    SquareMatrix m;

    NoiseMatrix() = default;
    explicit NoiseMatrix(SquareMatrix sm) : m(std::move(sm)) {}

    int d() const { return m.d; }
    double at(int i, int j) const { return m.at(i, j); }

    bool isStochastic(double eps = kStochEps) const;
    void requireStochastic() const;  // throws std::invalid_argument

    /// delta-uniform matrix: diagonal 1-(d-1)*delta, off-diagonal delta.
    static NoiseMatrix uniform(int d, double delta);
    static NoiseMatrix identity(int d) { return uniform(d, 0.0); }
};

struct NoiseClassification {
    bool lowerBounded = false;
    bool upperBounded = false;
    bool uniform = false;
};

/// Entrywise classification of N relative to delta, with tolerance kStochEps.
NoiseClassification classify(const NoiseMatrix& n, double delta);

/// Effective uniform noise level achievable from a delta-upper-bounded matrix:
/// 0 at delta=0, else (d + (1/2) * 1/(d-1)^2 * (1-d*delta)/delta)^-1.
/// Strictly increasing in delta and bounded above by 1/d.
double fDelta(double delta, int d);

/// Inverse of a delta-upper-bounded matrix (Gaussian elimination, partial
/// pivoting). Checks |N*N^-1 - I|_inf <= kInvertEps and the norm bound
/// |N^-1|_inf <= (d-1)/(1-d*delta) + kInvertEps; throws ContractViolation
/// if either fails.
SquareMatrix invert(const NoiseMatrix& n, double delta);

struct UniformizationResult {
    double deltaPrime = 0.0;
    NoiseMatrix artificialNoise;  // P
    NoiseMatrix targetUniform;    // T = N * P, deltaPrime-uniform
};

/// Artificial noise P such that N*P is exactly fDelta(delta,d)-uniform.
/// Entries of P in (-kStochEps, 0) are clamped to 0 and the row renormalized;
/// entries <= -kStochEps raise ContractViolation.
UniformizationResult uniformize(const NoiseMatrix& n, double delta);

/// Sample the received symbol for a displayed symbol. Walks row sigma's CDF
/// in index order and consumes exactly one value from the stream.
int applyNoise(const NoiseMatrix& n, int sigma, RngStream& rng);

/// JSON round-trip, format {"d": int, "entries": [[...], ...]}.
std::string noiseMatrixToJson(const NoiseMatrix& n);
NoiseMatrix noiseMatrixFromJson(const std::string& text);

/// Random delta-upper-bounded matrix: off-diagonal entries uniform in
/// [0, delta], diagonal set to the row remainder.
NoiseMatrix randomUpperBounded(int d, double delta, RngStream& rng);

} // namespace noisypull
