#include "noisypull/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace noisypull::oracle {

long double ExactDistribution::at(std::int64_t value) const {
    const std::int64_t idx = value - offset;
    if (idx < 0 || idx >= static_cast<std::int64_t>(prob.size())) return 0.0L;
    return prob[static_cast<std::size_t>(idx)];
}

long double ExactDistribution::probGreaterZero() const {
    long double p = 0.0L;
    for (std::size_t i = 0; i < prob.size(); ++i)
        if (offset + static_cast<std::int64_t>(i) > 0) p += prob[i];
    return p;
}

long double ExactDistribution::probLessZero() const {
    long double p = 0.0L;
    for (std::size_t i = 0; i < prob.size(); ++i)
        if (offset + static_cast<std::int64_t>(i) < 0) p += prob[i];
    return p;
}

long double ExactDistribution::probZero() const { return at(0); }

long double ExactDistribution::mass() const {
    long double p = 0.0L;
    for (const long double v : prob) p += v;
    return p;
}

ExactDistribution exactSumDistribution(const TrinomialSpec& spec) {
    if (spec.m < 0 || spec.m > kMaxDpTrials)
        throw std::invalid_argument("trial count outside [0, 10^4]");
    if (spec.pPlus < 0.0 || spec.pMinus < 0.0 || spec.pPlus + spec.pMinus > 1.0 + 1e-12)
        throw std::invalid_argument("step probabilities must be non-negative and sum to <= 1");

    const long double pp = spec.pPlus;
    const long double pm = spec.pMinus;
    const long double pz = 1.0L - pp - pm;

    ExactDistribution out;
    out.offset = -spec.m;
    const std::size_t width = static_cast<std::size_t>(2 * spec.m + 1);
    out.prob.assign(width, 0.0L);
    std::vector<long double> cur(width, 0.0L);
    cur[static_cast<std::size_t>(spec.m)] = 1.0L;  // point mass at 0

    std::vector<long double> next(width, 0.0L);
    for (std::int64_t t = 1; t <= spec.m; ++t) {
        const std::size_t lo = static_cast<std::size_t>(spec.m - t);
        const std::size_t hi = static_cast<std::size_t>(spec.m + t);
        for (std::size_t i = lo; i <= hi; ++i) {
            long double v = pz * cur[i];
            if (i > 0) v += pp * cur[i - 1];
            if (i + 1 < width) v += pm * cur[i + 1];
            next[i] = v;
        }
        std::swap(cur, next);
    }
    out.prob = std::move(cur);
    return out;
}

double gFunction(double theta, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (theta < 0.0 || theta > 0.5) throw std::invalid_argument("theta outside [0, 1/2]");
    const double md = static_cast<double>(m);
    if (theta < 1.0 / std::sqrt(md))
        return theta * std::pow(1.0 - theta * theta, (md - 1.0) / 2.0);
    return (1.0 / std::sqrt(md)) * std::pow(1.0 - 1.0 / md, (md - 1.0) / 2.0);
}

double boostingLowerBound(std::int64_t m, double theta) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (theta < 0.0) throw std::invalid_argument("theta must be >= 0");
    const double scale = std::sqrt(2.0 / (std::numbers::pi * std::numbers::e));
    return scale * std::min(std::sqrt(static_cast<double>(m)) * theta, 1.0);
}

double rademacherAdvantage(std::int64_t m, double theta) {
    if (m < 1 || m > kMaxDpTrials) throw std::invalid_argument("m outside [1, 10^4]");
    if (theta < 0.0 || theta > 0.5) throw std::invalid_argument("theta outside [0, 1/2]");

    const long double p = 0.5L + static_cast<long double>(theta);
    const long double q = 1.0L - p;
    if (q <= 0.0L) return 1.0;  // deterministic +1 steps

    // advantage = sum_{k > m/2} C(m,k) [p^k q^(m-k) - p^(m-k) q^k]
    //           = sum_{k > m/2} pmf(k) * (1 - (q/p)^(2k-m)),
    // every term non-negative, so the sum cannot go negative at theta = 0.
    const long double logp = logl(p);
    const long double logq = logl(q);
    const long double ratio = q / p;
    long double adv = 0.0L;
    for (std::int64_t k = m / 2 + 1; k <= m; ++k) {
        const long double logPmf = lgammal(static_cast<long double>(m + 1)) -
                                   lgammal(static_cast<long double>(k + 1)) -
                                   lgammal(static_cast<long double>(m - k + 1)) +
                                   static_cast<long double>(k) * logp +
                                   static_cast<long double>(m - k) * logq;
        adv += expl(logPmf) * (1.0L - powl(ratio, static_cast<long double>(2 * k - m)));
    }

    const double result = static_cast<double>(adv);
    assert(result + 1e-12 >= boostingLowerBound(m, theta));
    return result;
}

double binomialSingleHit(std::int64_t n, double p) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p outside [0, 1]");
    if (static_cast<double>(n) * p > 1.0 + 1e-12)
        throw std::invalid_argument("requires n*p <= 1");
    const double value = static_cast<double>(n) * p * std::pow(1.0 - p, static_cast<double>(n - 1));
    assert(value + 1e-12 >= static_cast<double>(n) * p / std::numbers::e);
    return value;
}

namespace {

void checkSourceCounts(std::int64_t n, std::int64_t s0, std::int64_t s1) {
    if (n < 1 || s0 < 0 || s1 < 0 || s0 + s1 > n)
        throw std::invalid_argument("invalid population/source counts");
}

double weakOpinionFromPair(const SamplePair& pair, std::int64_t m) {
    const ExactDistribution dist = exactSumDistribution({m, pair.pPlus, pair.pMinus});
    return static_cast<double>(dist.probGreaterZero() + 0.5L * dist.probZero());
}

} // namespace

SamplePair sfSampleProbs(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1) {
    checkSourceCounts(n, s0, s1);
    if (delta < 0.0 || delta >= 0.5) throw std::invalid_argument("requires delta in [0, 1/2)");
    const double f1 = static_cast<double>(s1) / n;
    const double f0 = static_cast<double>(s0) / n;
    const double aOne = f1 * (1.0 - delta) + (1.0 - f1) * delta;  // phase-0 message reads 1
    const double bOne = f0 * delta + (1.0 - f0) * (1.0 - delta);  // phase-1 message reads 1
    return {aOne * bOne, (1.0 - aOne) * (1.0 - bOne)};
}

SamplePair ssfSampleProbs(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1) {
    checkSourceCounts(n, s0, s1);
    if (delta < 0.0 || delta >= 0.25) throw std::invalid_argument("requires delta in [0, 1/4)");
    const double f1 = static_cast<double>(s1) / n;
    const double f0 = static_cast<double>(s0) / n;
    return {f1 * (1.0 - 3.0 * delta) + (1.0 - f1) * delta,
            f0 * (1.0 - 3.0 * delta) + (1.0 - f0) * delta};
}

double sfWeakOpinionExact(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1,
                          std::int64_t m) {
    return weakOpinionFromPair(sfSampleProbs(n, delta, s0, s1), m);
}

double ssfWeakOpinionExact(std::int64_t n, double delta, std::int64_t s0, std::int64_t s1,
                           std::int64_t m) {
    return weakOpinionFromPair(ssfSampleProbs(n, delta, s0, s1), m);
}

MConditionReport checkMCondition(std::int64_t n, std::int64_t h, double delta, std::int64_t s0,
                                 std::int64_t s1, int d, std::int64_t m, double logBase) {
    checkSourceCounts(n, s0, s1);
    if (d < 2) throw std::invalid_argument("alphabet size must be >= 2");
    const std::int64_t s = std::llabs(s1 - s0);
    if (s < 1) throw std::invalid_argument("requires bias s >= 1");

    const double nd = static_cast<double>(n);
    const double logn =
        logBase > 0.0 ? std::log(nd) / std::log(logBase) : std::log(nd);
    const double sd = static_cast<double>(s);
    const double minS2n = std::min(sd * sd, nd);
    const double oneMinus = 1.0 - d * delta;

    MConditionReport r;
    r.noiseTerm = nd * delta * logn / (minS2n * oneMinus * oneMinus);
    r.sqrtTerm = std::sqrt(nd) * logn / sd;
    r.sourceTerm = static_cast<double>(s0 + s1) * logn / (sd * sd);
    r.logTerm = logn;
    r.sum = r.noiseTerm + r.sqrtTerm + r.sourceTerm + r.logTerm;
    r.sfM = r.noiseTerm + r.sqrtTerm + r.sourceTerm + static_cast<double>(h) * logn;
    const double oneMinus4 = 1.0 - 4.0 * delta;
    r.ssfM = (oneMinus4 > 0.0)
                 ? delta * nd * logn / (oneMinus4 * oneMinus4) + nd
                 : std::numeric_limits<double>::infinity();
    const double md = static_cast<double>(m);
    r.coversSum = md >= r.sum;
    r.coversSf = md >= r.sfM;
    r.coversSsf = md >= r.ssfM;

    r.regimeThreshold = static_cast<double>(s0 + s1) / (2.0 * nd) * oneMinus;
    r.highNoise = delta >= r.regimeThreshold;
    if (r.highNoise)
        r.pLowerBound = 0.5 + sd / nd * oneMinus / (8.0 * delta);
    else
        r.pLowerBound = 0.5 + sd / (4.0 * static_cast<double>(s0 + s1));
    return r;
}

double multiplicativeChernoff(double delta, double mu) {
    if (delta < 0.0 || delta > 1.0) throw std::invalid_argument("delta outside [0, 1]");
    if (mu < 0.0) throw std::invalid_argument("mu must be >= 0");
    return std::exp(-delta * delta * mu / 2.0);
}

double hoeffdingBound(double delta, double sumSqRanges) {
    if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
    if (sumSqRanges <= 0.0) throw std::invalid_argument("sum of squared ranges must be > 0");
    return std::exp(-2.0 * delta * delta / sumSqRanges);
}

} // namespace noisypull::oracle
