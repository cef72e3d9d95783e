// Moment accumulator: merge consistency and the moment-test calibration.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowbond/rng.hpp"
#include "slowbond/stats.hpp"

using namespace slowbond;

TEST_CASE("merge equals pooled computation") {
    PhiloxRng rng(5, 5);
    std::vector<double> xs(500);
    for (auto& x : xs) x = rng.uniform() * 3.0 - 1.0;

    StatSummary pooled;
    for (double x : xs) pooled.add(x);

    StatSummary a, b, c;
    for (std::size_t i = 0; i < xs.size(); ++i)
        (i < 100 ? a : (i < 180 ? b : c)).add(xs[i]);
    StatSummary merged = a;
    merged.merge(b);
    merged.merge(c);

    CHECK(merged.count == pooled.count);
    CHECK(merged.mean == doctest::Approx(pooled.mean).epsilon(1e-12));
    CHECK(merged.variance() == doctest::Approx(pooled.variance()).epsilon(1e-10));
    CHECK(merged.central3() == doctest::Approx(pooled.central3()).epsilon(1e-9));
    CHECK(merged.central4() == doctest::Approx(pooled.central4()).epsilon(1e-9));
}

TEST_CASE("merged mean is the count-weighted mean of partial means") {
    StatSummary a, b;
    for (int i = 0; i < 10; ++i) a.add(1.0);
    for (int i = 0; i < 30; ++i) b.add(2.0);
    StatSummary m = a;
    m.merge(b);
    CHECK(m.mean == doctest::Approx((10.0 * 1.0 + 30.0 * 2.0) / 40.0));
}

TEST_CASE("moment tests calibrate on synthetic samples") {
    PhiloxRng rng(99, 3);
    StatSummary normal, expo;
    for (int i = 0; i < 4000; ++i) {
        // Box-Muller normal
        const double u1 = rng.uniform_pos(), u2 = rng.uniform();
        normal.add(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2));
        expo.add(rng.exponential(1.0));
    }
    const auto rn = moment_tests(normal);
    CHECK(rn.pass);
    const auto re = moment_tests(expo);
    CHECK_FALSE(re.pass);
    CHECK(std::abs(re.skewness_z) > 4.0);  // exponential skewness = 2

    StatSummary tiny;
    for (int i = 0; i < 50; ++i) tiny.add(1.0 * i);
    CHECK_THROWS(moment_tests(tiny));
}
