// Estimator machinery: incremental observables against fresh recomputation,
// martingale/QV consistency at small scale, Boltzmann-Gibbs bound values.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowbond/estimators.hpp"
#include "slowbond/quadrature.hpp"
#include "slowbond/rng.hpp"

using namespace slowbond;

namespace {

ModelParams params_of(int n, double alpha, double beta, double gamma, double a, double rho) {
    ModelParams p;
    p.n = n; p.alpha = alpha; p.beta = beta; p.gamma = gamma; p.a = a; p.rho = rho;
    return p;
}

// drive random effective swaps and compare the incremental value against a
// freshly reset copy
template <typename Make>
void check_incremental(const Make& make, const ModelParams& p, int sites, int steps) {
    Ring ring(sites);
    PhiloxRng rng(314, 15);
    ring.sample_bernoulli(p.rho, rng);
    auto obs = make(ring, p);
    obs->reset(ring);
    int applied = 0;
    while (applied < steps) {
        const int b = static_cast<int>(rng.below(sites));
        const int l = ring.left_index_of_bond(b);
        const int r = ring.right_index_of_bond(b);
        if (ring.occ_index(l) == ring.occ_index(r)) continue;
        ring.swap_bond(b);
        obs->on_swap(ring, b);
        ++applied;
    }
    auto fresh = make(ring, p);
    fresh->reset(ring);
    CHECK(obs->value() == doctest::Approx(fresh->value()).epsilon(1e-9));
}

}  // namespace

TEST_CASE("incremental observable updates match fresh recomputation") {
    const auto p = params_of(8, 1.5, 1.0, 1.0, 1.0, 0.5);
    auto phi = [](double u) { return std::exp(-u * u); };

    check_incremental(
        [&](const Ring& ring, const ModelParams& pp) {
            return std::make_unique<QvIntegrand>(ring, pp, phi);
        },
        p, 64, 3000);
    check_incremental(
        [&](const Ring& ring, const ModelParams& pp) {
            return std::make_unique<BIntegrand>(ring, pp, phi);
        },
        p, 64, 3000);
    check_incremental(
        [&](const Ring& ring, const ModelParams& pp) {
            const WeightSequence v(-6, std::vector<double>(13, 0.7), pp.n);
            return std::make_unique<BgIntegrand>(ring, pp, v, 5);
        },
        p, 64, 3000);
    check_incremental(
        [&](const Ring& ring, const ModelParams& pp) {
            return std::make_unique<TwoBlockIntegrand>(ring, pp, phi, 4);
        },
        p, 64, 3000);
    check_incremental(
        [&](const Ring& ring, const ModelParams& pp) {
            return std::make_unique<EnergyQuadIntegrand>(ring, pp, phi, 4);
        },
        p, 64, 3000);
    check_incremental(
        [&](const Ring& ring, const ModelParams&) {
            std::vector<double> c(ring.size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::sin(0.3 * i);
            return std::make_unique<LinearSiteSum>(std::move(c));
        },
        p, 64, 3000);
    check_incremental(
        [&](const Ring& ring, const ModelParams& pp) {
            (void)ring;
            return std::make_unique<CenteredProduct>(std::vector<int>{-1, 0}, pp.rho);
        },
        p, 64, 3000);
}

TEST_CASE("quadratic variation vanishes on the frozen full ring and accumulates monotonically") {
    SimSpec spec;
    spec.params = params_of(4, 1.0, 1.0, 1.0, 0.5, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.3;
    spec.seed = 9;
    spec.snapshot_times = {0.0, 0.1, 0.2, 0.3};
    const auto phi = make_gaussian(1.0);
    register_qv(spec, "qv", phi);

    SimSpec frozen = spec;
    frozen.initial_occupancy.assign(spec.ring_sites(), 1);
    const auto rec0 = run_path(frozen, 0);
    CHECK(quadratic_variation(rec0, "qv") == 0.0);

    for (const auto& rec : run_paths(spec, 10)) {
        CHECK(quadratic_variation(rec, "qv") >= 0.0);
        for (std::size_t k = 0; k + 1 < spec.snapshot_times.size(); ++k)
            CHECK(rec.integral_between("qv", k, k + 1) >= 0.0);
    }
    CHECK_THROWS_AS(quadratic_variation(run_path(spec, 0), "nope"), std::out_of_range);
}

TEST_CASE("stationary mean of the quadratic variation matches the product-measure value") {
    // a = 0, beta = 0, rho = 1/2: E[QV]/t = (1/4) (1/n) sum (grad^n phi)^2
    SimSpec spec;
    spec.params = params_of(8, 1.0, 0.0, 1.0, 0.0, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.25;
    spec.seed = 31;
    const auto phi = make_gaussian(1.0);
    register_qv(spec, "qv", phi);

    double grad_sq = 0.0;
    const double n = spec.params.n;
    for (int x = -spec.ring_sites() / 2; x < spec.ring_sites() / 2; ++x) {
        const double g = n * (phi((x + 1) / n) - phi(x / n));
        grad_sq += g * g;
    }
    const double expect = 0.25 * grad_sq / n * spec.t_final;

    const auto paths = run_paths(spec, 400);
    const auto s = summarize(paths, [](const PathRecord& r) { return r.integral_of("qv"); });
    CHECK(std::abs(s.mean - expect) <= 4.0 * s.stderr_mean() + 1e-12);
    // and the n -> infinity limit value t chi ||phi'||^2 is already close at n = 8
    const double limit = spec.t_final * 0.25 *
                         integrate([&](double u) { const double d = phi.deriv(u, 1); return d * d; },
                                   -8.0, 8.0, 1e-10);
    CHECK(s.mean == doctest::Approx(limit).epsilon(0.05));
}

TEST_CASE("b field vanishes identically for a = 0 and on constant configurations") {
    SimSpec spec;
    spec.params = params_of(4, 1.0, 0.5, 1.0, 0.0, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.2;
    spec.seed = 11;
    const auto phi = make_gaussian(1.0);
    register_b_field(spec, "b", phi);
    for (const auto& rec : run_paths(spec, 8)) CHECK(b_field(rec, "b") == 0.0);

    // frozen full ring, a > 0: telescoping makes the integrand exactly zero
    SimSpec spec2 = spec;
    spec2.params.a = 1.0;
    spec2.integrals.clear();
    register_b_field(spec2, "b", phi);
    spec2.initial_occupancy.assign(spec2.ring_sites(), 1);
    // telescoping sum of gradients; zero up to float cancellation residue
    CHECK(std::abs(b_field(run_path(spec2, 0), "b")) < 1e-15);
}

TEST_CASE("martingale residual is centered and its variance matches the mean QV") {
    SimSpec spec;
    spec.params = params_of(8, 1.0, 0.5, 1.0, 1.0, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.25;
    spec.seed = 77;
    spec.snapshot_times = {0.0, 0.25};
    const auto phi = make_gaussian(std::sqrt(0.5));  // e^{-u^2}: tails clear the window
    register_field_snapshot(spec, "y", phi);
    register_symmetric_drift(spec, "drift", phi);
    register_b_field(spec, "b", phi);
    register_qv(spec, "qv", phi);

    SimSpec at_zero = spec;
    at_zero.t_final = 0.0;
    at_zero.snapshot_times = {0.0, 0.0};
    CHECK(martingale_residual(run_path(at_zero, 0), "y", 0, 1, "drift", "b") == 0.0);

    const auto paths = run_paths(spec, 600);
    // stationary start keeps the field centered
    const auto y0 = summarize(paths, [](const PathRecord& r) { return r.snapshot_of("y", 0); });
    CHECK(std::abs(y0.mean) <= 4.0 * y0.stderr_mean());

    const auto m = summarize(paths, [](const PathRecord& r) {
        return martingale_residual(r, "y", 0, 1, "drift", "b");
    });
    CHECK(std::abs(m.mean) <= 4.0 * m.stderr_mean());

    const auto qv = summarize(paths, [](const PathRecord& r) { return r.integral_of("qv"); });
    // Var(M) = E<M>; allow joint Monte Carlo error
    const double var_se = m.variance() * std::sqrt(2.0 / (m.count - 1));
    CHECK(std::abs(m.variance() - qv.mean) <=
          4.0 * (var_se + qv.stderr_mean()) + 0.02 * qv.mean);
}

TEST_CASE("bg statistics: zero horizon, nonnegativity, frozen bound value") {
    SimSpec spec;
    spec.params = params_of(8, 1.0, 0.5, 1.0, 1.0, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.0;
    spec.seed = 5;
    const WeightSequence v(-4, {0.5, 1.0, -1.0, 0.25, 0.7, -0.3, 0.1, 0.9, 0.2}, 8);
    register_bg(spec, "bg", v, 4);
    CHECK(run_path(spec, 0).integral_of("bg") == 0.0);

    spec.t_final = 0.2;
    const auto sq = square_summary(run_paths(spec, 50), "bg");
    CHECK(sq.mean >= 0.0);
}

TEST_CASE("bg bound formula on the worked example") {
    // n=100, L=10, t=1, beta=0, alpha=1, both weight norms equal to 1
    std::vector<double> vv(10, std::sqrt(10.0));
    BgSpec spec{WeightSequence(1, vv, 100), 10, 1.0,
                params_of(100, 1.0, 0.0, 1.0, 1.0, 0.5)};
    CHECK(spec.v.norm_sq_2n() == doctest::Approx(1.0));
    CHECK(spec.v.norm_sq_2n_off_slow() == doctest::Approx(1.0));
    const double lg = std::log2(10.0);
    CHECK(bg_bound(spec) == doctest::Approx(1.11 + lg * lg / 100.0).epsilon(1e-12));
    CHECK(bg_bound(spec) == doctest::Approx(1.2203).epsilon(1e-3));
}

TEST_CASE("bg bound is minimized at an interior box size") {
    // L/n + t n / L^2 has its minimum near (2 t n^2)^{1/3}
    std::vector<double> vv(10, std::sqrt(10.0));
    auto bound_at = [&](int L) {
        return bg_bound({WeightSequence(1, vv, 100), L, 1.0,
                         params_of(100, 1.0, 0.0, 1.0, 1.0, 0.5)});
    };
    const int lstar = static_cast<int>(std::round(std::cbrt(2.0 * 1.0 * 100.0 * 100.0)));
    CHECK(bound_at(lstar) < bound_at(lstar / 2));
    CHECK(bound_at(lstar) < bound_at(2 * lstar));
}

TEST_CASE("two-block and energy statistics vanish where they must") {
    SimSpec spec;
    spec.params = params_of(8, 1.0, 0.5, 1.0, 1.0, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.2;
    spec.seed = 21;
    spec.snapshot_times = {0.0, 0.1, 0.2};
    const auto phi = make_gaussian(1.0);
    register_two_block(spec, "tb", phi, 2);
    register_energy_quad(spec, "en", phi, 2);

    SimSpec frozen = spec;
    frozen.initial_occupancy.assign(spec.ring_sites(), 1);
    const auto recf = run_path(frozen, 0);
    CHECK(recf.integral_of("tb") == 0.0);

    const auto rec = run_path(spec, 3);
    CHECK(energy_quadratic(rec, "en", 1, 1) == 0.0);  // s = t
    CHECK(energy_quadratic(rec, "en", 0, 2) ==
          doctest::Approx(rec.integral_of("en")).epsilon(1e-12));
}

TEST_CASE("pair statistic is a nonnegative ensemble square starting at zero") {
    SimSpec spec;
    spec.params = params_of(8, 2.0, 1.0, 1.0, 1.0, 0.5);
    spec.lattice_factor = 8;
    spec.t_final = 0.0;
    spec.seed = 3;
    register_pair_product(spec, "pair");
    CHECK(run_path(spec, 0).integral_of("pair") == 0.0);

    spec.t_final = 0.2;
    const auto sq = square_summary(run_paths(spec, 60), "pair");
    CHECK(sq.mean >= 0.0);
}

TEST_CASE("two-block bound scale follows the coarse-grid gradient sum") {
    const auto phi = make_gaussian(1.0);
    const int n = 16, eps_n = 4;
    const double t = 0.5;
    const double eps = static_cast<double>(eps_n) / n;
    double sum = 0.0;
    for (int j = -60; j <= 60; ++j) {
        const double g = phi.deriv(eps * j, 1);
        sum += g * g;
    }
    CHECK(two_block_bound_scale(phi, n, eps_n, t) == doctest::Approx(t * eps * sum).epsilon(1e-9));
}
