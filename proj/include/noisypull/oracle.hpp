#pragma once

#include <cstdint>
#include <vector>

namespace noisypull::oracle {

/// Sum of m i.i.d. variables in {-1, 0, +1}.
struct TrinomialSpec {
    std::int64_t m = 0;
    double pPlus = 0.0;
    double pMinus = 0.0;
};

inline constexpr std::int64_t kMaxDpTrials = 10000;

/// Exact distribution over the integer support [-m, m].
struct ExactDistribution {
    std::int64_t offset = 0;  // value of the first entry's support point
    std::vector<long double> prob;

    long double at(std::int64_t value) const;
    long double probGreaterZero() const;
    long double probLessZero() const;
    long double probZero() const;
    long double mass() const;
};

/// Convolution DP; rejects m > kMaxDpTrials or m < 0.
ExactDistribution exactSumDistribution(const TrinomialSpec& spec);

/// Pr(X>0) - Pr(X<0) for X a sum of m Rademacher(1/2+theta) variables,
/// computed from the exact binomial CDF. Domain: m >= 1, 0 <= theta <= 1/2,
/// m <= kMaxDpTrials.
double rademacherAdvantage(std::int64_t m, double theta);

/// sqrt(2/(pi*e)) * min(sqrt(m)*theta, 1).
double boostingLowerBound(std::int64_t m, double theta);

/// Two-branch majority-advantage kernel:
///   theta * (1-theta^2)^((m-1)/2)        if theta <  1/sqrt(m)
///   (1/sqrt(m)) * (1-1/m)^((m-1)/2)      if theta >= 1/sqrt(m)
double gFunction(double theta, std::int64_t m);

/// Exact Pr(Binomial(n,p) = 1) = n*p*(1-p)^(n-1); requires n*p <= 1.
/// Always at least n*p/e.
double binomialSingleHit(std::int64_t n, double p);

/// Per-sample +/- probabilities for the two-phase counting protocol
/// under uniform binary noise.
struct SamplePair {
    double pPlus = 0.0;
    double pMinus = 0.0;
};

SamplePair sfSampleProbs(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1);
SamplePair ssfSampleProbs(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1);

/// Exact probability that a weak opinion is 1 (ties worth 1/2), from the
/// closed-form per-sample probabilities and the sum DP over m samples.
double sfWeakOpinionExact(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1,
                          std::int64_t m);
double ssfWeakOpinionExact(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1,
                           std::int64_t m);

/// Term-by-term report of the sample-count condition at c1 = 1, plus the
/// noise-regime split and the implied per-sample advantage lower bound.
struct MConditionReport {
    double noiseTerm = 0.0;    // n*delta*log n / (min(s^2,n) * (1-d*delta)^2)
    double sqrtTerm = 0.0;     // sqrt(n)*log n / s
    double sourceTerm = 0.0;   // (s0+s1)*log n / s^2
    double logTerm = 0.0;      // log n
    double sum = 0.0;          // the four terms above
    double sfM = 0.0;          // sum with the last term replaced by h*log n
    double ssfM = 0.0;         // delta*n*log n/(1-4*delta)^2 + n (4-symbol alphabet)
    bool coversSum = false;    // m >= sum
    bool coversSf = false;     // m >= sfM
    bool coversSsf = false;    // m >= ssfM
    bool highNoise = false;    // delta >= (s0+s1)/(2n) * (1-d*delta)
    double regimeThreshold = 0.0;
    double pLowerBound = 0.0;  // 1/2 + s(1-d*delta)/(8n*delta)  or  1/2 + s/(4(s0+s1))
};

MConditionReport checkMCondition(std::int64_t n, std::int64_t h, double delta, std::int64_t s0,
                                 std::int64_t s1, int d, std::int64_t m, double logBase = 0.0);

/// exp(-delta^2 * mu / 2), valid for delta in [0, 1].
double multiplicativeChernoff(double delta, double mu);

/// exp(-2 * delta^2 / sumSqRanges) where sumSqRanges = sum of (b_i - a_i)^2.
double hoeffdingBound(double delta, double sumSqRanges);

} // namespace noisypull::oracle
