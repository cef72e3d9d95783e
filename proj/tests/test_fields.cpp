// Fluctuation-field arithmetic: centering, block averages, field values,
// discrete derivatives, weight sequences.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowbond/fields.hpp"
#include "slowbond/test_function.hpp"

using namespace slowbond;

namespace {

ModelParams half_density(int n) {
    ModelParams p;
    p.n = n; p.alpha = 1.0; p.beta = 0.0; p.gamma = 1.0; p.a = 0.0; p.rho = 0.5;
    return p;
}

}  // namespace

TEST_CASE("centered occupation") {
    Ring ring(8);
    ring.set(2, 1);
    CHECK(centered(ring, 2, 0.5) == 0.5);
    CHECK(centered(ring, 1, 0.5) == -0.5);
    CHECK(centered(ring, 2, 0.3) == doctest::Approx(0.7));
}

TEST_CASE("one-sided empirical averages") {
    Ring ring(16);
    ring.set(1, 1);
    ring.set(3, 1);
    CHECK(empirical_average(ring, 0, 3, 0.5, Side::Right) == doctest::Approx(1.0 / 6.0));

    Ring full(16);
    full.fill(1);
    CHECK(empirical_average(full, 0, 5, 0.5, Side::Right) == doctest::Approx(0.5));

    Ring left_case(16);
    left_case.set(-1, 1);
    CHECK(empirical_average(left_case, 0, 2, 0.5, Side::Left) == doctest::Approx(0.0));

    CHECK_THROWS_AS(empirical_average(ring, 5, 10, 0.5, Side::Right), std::out_of_range);
}

TEST_CASE("right average at x equals left average at x+L+1") {
    Ring ring(32);
    for (int x : {-5, -2, 0, 1, 4, 7}) ring.set(x, 1);
    for (int L : {1, 2, 5}) {
        for (int x = -8; x <= 6; ++x)
            CHECK(empirical_average(ring, x, L, 0.3, Side::Right) ==
                  doctest::Approx(empirical_average(ring, x + L + 1, L, 0.3, Side::Left)));
    }
}

TEST_CASE("fluctuation field on a frozen block") {
    // n = 1 on an 8-site ring: sites -4..3; occupy |x| <= 3, leave -4 empty
    const auto p = half_density(1);
    Ring ring(8);
    for (int x = -3; x <= 3; ++x) ring.set(x, 1);
    const auto phi = make_gaussian(std::sqrt(0.5));  // e^{-u^2}
    const double y = fluctuation_field(ring, [&](double u) { return phi(u); }, p, 0.0);
    double expect = 0.0;
    for (int x = -3; x <= 3; ++x) expect += 0.5 * std::exp(-static_cast<double>(x) * x);
    expect -= 0.5 * std::exp(-16.0);
    CHECK(y == doctest::Approx(expect).epsilon(1e-13));
    CHECK(y == doctest::Approx(0.8863).epsilon(2e-4));
}

TEST_CASE("fluctuation field is linear in phi") {
    const auto p = half_density(2);
    Ring ring(16);
    for (int x : {-3, 0, 2, 5}) ring.set(x, 1);
    auto f = [](double u) { return std::exp(-u * u); };
    auto g = [](double u) { return u * std::exp(-u * u); };
    const double yf = fluctuation_field(ring, f, p, 0.0);
    const double yg = fluctuation_field(ring, g, p, 0.0);
    const double ysum = fluctuation_field(
        ring, [&](double u) { return 2.0 * f(u) - 3.0 * g(u); }, p, 0.0);
    CHECK(ysum == doctest::Approx(2.0 * yf - 3.0 * yg).epsilon(1e-12));
}

TEST_CASE("tail tolerance violation is reported") {
    const auto p = half_density(1);
    Ring ring(8);
    CHECK_THROWS_AS(
        fluctuation_field(ring, [](double u) { return std::exp(-u * u / 8.0); }, p, 0.0),
        std::domain_error);
}

TEST_CASE("galilean shift moves the test-function argument") {
    ModelParams p;
    p.n = 2; p.alpha = 1.0; p.beta = 0.0; p.gamma = 1.0; p.a = 1.0; p.rho = 0.25;
    Ring ring(16);
    ring.set(1, 1);
    const double t = 0.3;
    const double shift = p.shift_velocity() * t;  // n^{2-gamma} a (1-2 rho) t
    CHECK(shift == doctest::Approx(2.0 * 0.5 * t));
    auto f = [](double u) { return std::exp(-u * u); };
    const double y = fluctuation_field(ring, f, p, t);
    double expect = 0.0;
    for (int x = -8; x <= 7; ++x)
        expect += ((x == 1 ? 1.0 : 0.0) - p.rho) * f((x - shift) / 2.0);
    expect /= std::sqrt(2.0);
    CHECK(y == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("box indicator realizes the block-average substitution identity") {
    const int n = 4;
    const auto p = half_density(n);
    Ring ring(8 * n);
    for (int x : {-6, -2, 0, 3, 4, 9}) ring.set(x, 1);
    const double eps = 0.5;
    const int eps_n = 2;
    for (int xn : {-4, 0, 2, 6}) {
        const double x0 = static_cast<double>(xn) / n;
        const double y = fluctuation_field(ring, box_indicator(x0, eps), p, 0.0, 0.0);
        const double avg = empirical_average(ring, xn, eps_n, p.rho, Side::Right);
        CHECK(y == doctest::Approx(std::sqrt(static_cast<double>(n)) * avg).epsilon(1e-12));
    }
}

TEST_CASE("discrete derivatives are exact on quadratics and telescope to zero") {
    auto sq = [](double u) { return u * u; };
    CHECK(discrete_derivative(sq, 0, 10, 1) == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(discrete_derivative(sq, 0, 10, 2) == doctest::Approx(2.0).epsilon(1e-10));
    auto lin = [](double u) { return 3.0 * u - 1.0; };
    CHECK(discrete_derivative(lin, 5, 7, 2) == doctest::Approx(0.0).epsilon(1e-9));

    auto bump = [](double u) { return std::exp(-u * u); };
    double sum = 0.0;
    const int n = 8;
    for (int x = -100; x < 100; ++x) sum += discrete_derivative(bump, x, n, 1);
    CHECK(std::abs(sum) < 1e-12);  // telescoping: n(phi(100/n) - phi(-100/n))
}

TEST_CASE("weight sequence caches both norms") {
    // v = 1 on [-2, 2], n = 10
    WeightSequence v(-2, {1.0, 1.0, 1.0, 1.0, 1.0}, 10);
    CHECK(v.norm_sq_2n() == doctest::Approx(0.5));
    CHECK(v.norm_sq_2n_off_slow() == doctest::Approx(0.4));  // x = -1 excluded
    CHECK(v(-2) == 1.0);
    CHECK(v(3) == 0.0);

    const auto phi = make_gaussian(1.0);
    const auto vg = WeightSequence::from_gradient([&](double u) { return phi(u); }, 10, -30, 30);
    CHECK(vg(0) == doctest::Approx(discrete_derivative([&](double u) { return phi(u); }, 0, 10, 1)));
}
