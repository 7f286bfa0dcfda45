#include "noisypull/noise.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include <json.hpp>

namespace noisypull {

SquareMatrix SquareMatrix::identity(int dim) {
    SquareMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

SquareMatrix multiply(const SquareMatrix& lhs, const SquareMatrix& rhs) {
    if (lhs.d != rhs.d) throw std::invalid_argument("matrix dimension mismatch");
    SquareMatrix out(lhs.d);
    for (int i = 0; i < lhs.d; ++i)
        for (int k = 0; k < lhs.d; ++k) {
            const double v = lhs.at(i, k);
            for (int j = 0; j < lhs.d; ++j) out.at(i, j) += v * rhs.at(k, j);
        }
    return out;
}

double infinityNorm(const SquareMatrix& m) {
    double best = 0.0;
    for (int i = 0; i < m.d; ++i) {
        double row = 0.0;
        for (int j = 0; j < m.d; ++j) row += std::abs(m.at(i, j));
        if (row > best) best = row;
    }
    return best;
}

bool NoiseMatrix::isStochastic(double eps) const {
    if (d() < 1) return false;
    for (int i = 0; i < d(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < d(); ++j) {
            if (at(i, j) < -eps) return false;
            sum += at(i, j);
        }
        if (std::abs(sum - 1.0) > eps) return false;
    }
    return true;
}

void NoiseMatrix::requireStochastic() const {
    if (!isStochastic()) throw std::invalid_argument("matrix is not row-stochastic");
}

NoiseMatrix NoiseMatrix::uniform(int d, double delta) {
    if (d < 2) throw std::invalid_argument("alphabet size must be >= 2");
    if (delta < 0.0 || delta > 1.0 / d) throw std::invalid_argument("uniform level outside [0, 1/d]");
    SquareMatrix m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m.at(i, j) = (i == j) ? 1.0 - (d - 1) * delta : delta;
    return NoiseMatrix(std::move(m));
}

NoiseClassification classify(const NoiseMatrix& n, double delta) {
    n.requireStochastic();
    const int d = n.d();
    if (delta < 0.0 || delta > 1.0 / d) throw std::invalid_argument("delta outside [0, 1/d]");

    NoiseClassification c{true, true, true};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double v = n.at(i, j);
            if (v < delta - kStochEps) c.lowerBounded = false;
            if (i == j) {
                if (v < 1.0 - (d - 1) * delta - kStochEps) c.upperBounded = false;
                if (std::abs(v - (1.0 - (d - 1) * delta)) > kStochEps) c.uniform = false;
            } else {
                if (v > delta + kStochEps) c.upperBounded = false;
                if (std::abs(v - delta) > kStochEps) c.uniform = false;
            }
        }
    }
    return c;
}

double fDelta(double delta, int d) {
    if (d < 2) throw std::invalid_argument("alphabet size must be >= 2");
    if (delta < 0.0 || delta >= 1.0 / d) throw std::invalid_argument("delta outside [0, 1/d)");
    if (delta == 0.0) return 0.0;
    const double dm1 = static_cast<double>(d - 1);
    return 1.0 / (d + 0.5 * (1.0 / (dm1 * dm1)) * (1.0 - d * delta) / delta);
}

namespace {

SquareMatrix gaussInverse(const SquareMatrix& in) {
    const int d = in.d;
    SquareMatrix a = in;
    SquareMatrix inv = SquareMatrix::identity(d);
    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
        if (a.at(pivot, col) == 0.0) throw ContractViolation("matrix is numerically singular");
        if (pivot != col)
            for (int j = 0; j < d; ++j) {
                std::swap(a.at(pivot, j), a.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        const double diag = a.at(col, col);
        for (int j = 0; j < d; ++j) {
            a.at(col, j) /= diag;
            inv.at(col, j) /= diag;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a.at(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                a.at(r, j) -= f * a.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

} // namespace

SquareMatrix invert(const NoiseMatrix& n, double delta) {
    const int d = n.d();
    if (delta < 0.0 || delta >= 1.0 / d)
        throw std::invalid_argument("inversion requires delta in [0, 1/d)");
    const NoiseClassification c = classify(n, delta);
    if (!c.upperBounded)
        throw std::invalid_argument("matrix is not delta-upper bounded for the given delta");

    SquareMatrix inv = gaussInverse(n.m);

    SquareMatrix residual = multiply(n.m, inv);
    for (int i = 0; i < d; ++i) residual.at(i, i) -= 1.0;
    if (infinityNorm(residual) > kInvertEps)
        throw ContractViolation("inversion residual exceeds tolerance (ill-conditioned input)");

    const double bound = (d - 1) / (1.0 - d * delta) + kInvertEps;
    if (infinityNorm(inv) > bound)
        throw ContractViolation("inverse norm exceeds (d-1)/(1-d*delta)");

    return inv;
}

UniformizationResult uniformize(const NoiseMatrix& n, double delta) {
    const int d = n.d();
    const double deltaPrime = fDelta(delta, d);

    UniformizationResult out;
    out.deltaPrime = deltaPrime;
    out.targetUniform = NoiseMatrix::uniform(d, deltaPrime);

    if (delta == 0.0) {
        // 0-upper-bounded forces N = I, so no inversion is needed.
        const NoiseClassification c = classify(n, 0.0);
        if (!c.upperBounded) throw std::invalid_argument("matrix is not 0-upper bounded");
        out.artificialNoise = NoiseMatrix::identity(d);
        return out;
    }

    const SquareMatrix inv = invert(n, delta);
    SquareMatrix p = multiply(inv, out.targetUniform.m);

    for (int i = 0; i < d; ++i) {
        double rowSum = 0.0;
        for (int j = 0; j < d; ++j) {
            double& v = p.at(i, j);
            if (v <= -kStochEps)
                throw ContractViolation("artificial noise entry below -eps at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            if (v < 0.0) v = 0.0;
            rowSum += v;
        }
        if (std::abs(rowSum - 1.0) > kStochEps)
            throw ContractViolation("artificial noise row " + std::to_string(i) +
                                    " does not sum to 1");
        for (int j = 0; j < d; ++j) p.at(i, j) /= rowSum;
    }
    out.artificialNoise = NoiseMatrix(std::move(p));

    SquareMatrix compose = multiply(n.m, out.artificialNoise.m);
    double maxDiff = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            maxDiff = std::max(maxDiff, std::abs(compose.at(i, j) - out.targetUniform.at(i, j)));
    if (maxDiff > kStochEps)
        throw ContractViolation("N*P deviates from the uniform target beyond tolerance");

    return out;
}

int applyNoise(const NoiseMatrix& n, int sigma, RngStream& rng) {
    const int d = n.d();
    const double u = rng.nextDouble();
    double cum = 0.0;
    for (int j = 0; j < d - 1; ++j) {
        cum += n.at(sigma, j);
        if (u < cum) return j;
    }
    return d - 1;
}

std::string noiseMatrixToJson(const NoiseMatrix& n) {
    nlohmann::json j;
    j["d"] = n.d();
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < n.d(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < n.d(); ++k) row.push_back(n.at(i, k));
        rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
    return j.dump();
}

NoiseMatrix noiseMatrixFromJson(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("d") || !j.contains("entries"))
        throw std::invalid_argument("noise matrix JSON needs \"d\" and \"entries\"");
    const int d = j.at("d").get<int>();
    if (d < 2) throw std::invalid_argument("alphabet size must be >= 2");
    const auto& rows = j.at("entries");
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
        throw std::invalid_argument("entries must hold d rows");
    SquareMatrix m(d);
    for (int i = 0; i < d; ++i) {
        const auto& row = rows.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != d)
            throw std::invalid_argument("entries row has wrong length");
        for (int k = 0; k < d; ++k) m.at(i, k) = row.at(k).get<double>();
    }
    NoiseMatrix n(std::move(m));
    n.requireStochastic();
    return n;
}

NoiseMatrix randomUpperBounded(int d, double delta, RngStream& rng) {
    SquareMatrix m(d);
    for (int i = 0; i < d; ++i) {
        double off = 0.0;
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const double v = delta * rng.nextDouble();
            m.at(i, j) = v;
            off += v;
        }
        m.at(i, i) = 1.0 - off;
    }
    return NoiseMatrix(std::move(m));
}

} // namespace noisypull
