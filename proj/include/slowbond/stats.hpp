// stats.hpp
// Streaming central-moment accumulator (up to 4th order) with an exact,
// order-independent merge (Pebay update formulas). Replica farms merge
// per-replica summaries in a fixed order so results are bit-stable.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace slowbond {

struct StatSummary {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of (x-mean)^2
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) { merge(StatSummary{1, x, 0.0, 0.0, 0.0}); }

    void merge(const StatSummary& o) {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(o.count);
        const double n = na + nb;
        const double d = o.mean - mean;
        const double d2 = d * d;
        const double m4n = m4 + o.m4 + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
                         + 6.0 * d2 * (na * na * o.m2 + nb * nb * m2) / (n * n)
                         + 4.0 * d * (na * o.m3 - nb * m3) / n;
        const double m3n = m3 + o.m3 + d * d2 * na * nb * (na - nb) / (n * n)
                         + 3.0 * d * (na * o.m2 - nb * m2) / n;
        const double m2n = m2 + o.m2 + d2 * na * nb / n;
        mean += d * nb / n;
        m2 = m2n; m3 = m3n; m4 = m4n;
        count += o.count;
    }

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double stderr_mean() const {
        return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
    double central3() const { return count > 0 ? m3 / static_cast<double>(count) : 0.0; }
    double central4() const { return count > 0 ? m4 / static_cast<double>(count) : 0.0; }

    double skewness() const {
        const double v = m2 / static_cast<double>(count);
        return v > 0.0 ? central3() / std::pow(v, 1.5) : 0.0;
    }
    double excess_kurtosis() const {
        const double v = m2 / static_cast<double>(count);
        return v > 0.0 ? central4() / (v * v) - 3.0 : 0.0;
    }
};

struct MomentReport {
    std::int64_t count = 0;
    double skewness = 0.0;
    double skewness_z = 0.0;
    double kurtosis = 0.0;
    double kurtosis_z = 0.0;
    bool pass = false;
};

// Standardized skewness / excess-kurtosis test at the given z threshold.
// Large-sample standard errors sqrt(6/R) and sqrt(24/R).
inline MomentReport moment_tests(const StatSummary& s, double z_threshold = 4.0) {
    if (s.count < 100) throw std::invalid_argument("moment_tests: need at least 100 samples");
    MomentReport r;
    r.count = s.count;
    const double n = static_cast<double>(s.count);
    r.skewness = s.skewness();
    r.kurtosis = s.excess_kurtosis();
    r.skewness_z = r.skewness / std::sqrt(6.0 / n);
    r.kurtosis_z = r.kurtosis / std::sqrt(24.0 / n);
    r.pass = std::abs(r.skewness_z) < z_threshold && std::abs(r.kurtosis_z) < z_threshold;
    return r;
}

}  // namespace slowbond
