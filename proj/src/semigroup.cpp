#include "slowbond/semigroup.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slowbond/quadrature.hpp"

namespace slowbond {

namespace {

constexpr double kSmallT = 1e-4;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// probabilists' Hermite polynomial He_k
double hermite_prob(int k, double x) {
    double hm1 = 0.0, h = 1.0;
    for (int j = 0; j < k; ++j) {
        const double next = x * h - static_cast<double>(j) * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

// (d/dz)^k of exp(-z^2/2t)/sqrt(2 pi t)
double heat_deriv(double z, double t, int k) {
    const double s = std::sqrt(t);
    const double base = std::exp(-z * z / (2.0 * t)) / std::sqrt(kTwoPi * t);
    if (k == 0) return base;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * hermite_prob(k, z / s) / std::pow(s, k) * base;
}

// e^{x^2} erfc(x); stable for all x (asymptotic series beyond the range where
// the direct product is representable)
double erfcx(double x) {
    if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
    if (x <= 25.0) return std::exp(x * x) * std::erfc(x);
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 10; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(M_PI));
}

// integration half-width capturing the heat kernel to ~1e-18
double kernel_width(double t) { return 10.0 * std::sqrt(t); }

struct SideFun {
    const TestFunction* g;
    int sign;  // data side: evaluate g(sign * y)
    double operator()(double y) const { return g->deriv(sign * y, 0); }
};

double blend(const TestFunction& g, double y, int k, double we, double wo) {
    // we * g_even^{(k)}(y) + wo * g_odd^{(k)}(y), derivatives of the parts
    const double gp = g.deriv(y, k);
    const double gm = g.deriv(-y, k) * ((k % 2 == 0) ? 1.0 : -1.0);
    return 0.5 * (we * (gp + gm) + wo * (gp - gm));
}

double g_even_deriv(const TestFunction& g, double y, int k) { return blend(g, y, k, 1, 0); }
double g_odd_deriv(const TestFunction& g, double y, int k) { return blend(g, y, k, 0, 1); }

// free evolution of the even part: (d/dx)^k int K_t(x-y) g_even(y) dy
double even_part_deriv(const TestFunction& g, double t, double x, double tol, int k) {
    const double u_max = g.tail_radius();
    const double w = kernel_width(t);
    const double lo = std::max(-u_max, x - w), hi = std::min(u_max, x + w);
    if (lo >= hi) return 0.0;
    return integrate([&](double y) { return heat_deriv(x - y, t, k) * g_even_deriv(g, y, 0); },
                     lo, hi, tol, tol * 1e-3, 4000, {0.0});
}

// polynomial coefficients of the two Robin inner-kernel terms and their
// z-derivatives: term = P_j(w) e^{-w^2/2t} with w = z -+ y
struct InnerPolys {
    std::vector<std::vector<double>> minus, plus;  // index: derivative order j
    InnerPolys(double t, double alpha, int j_max) {
        minus.push_back({2.0 * alpha, 1.0 / t});   // (z-y)/t + 2 alpha
        plus.push_back({-2.0 * alpha, 1.0 / t});   // (z+y)/t - 2 alpha
        for (int j = 0; j < j_max; ++j) {
            minus.push_back(step(minus.back(), t));
            plus.push_back(step(plus.back(), t));
        }
    }
    static std::vector<double> step(const std::vector<double>& p, double t) {
        // d/dw of P(w) e^{-w^2/2t}: P' - (w/t) P
        std::vector<double> out(p.size() + 1, 0.0);
        for (std::size_t j = 1; j < p.size(); ++j) out[j - 1] += p[j] * static_cast<double>(j);
        for (std::size_t j = 0; j < p.size(); ++j) out[j + 1] -= p[j] / t;
        return out;
    }
    static double eval(const std::vector<double>& p, double w) {
        double v = 0.0;
        for (std::size_t j = p.size(); j-- > 0;) v = v * w + p[j];
        return v;
    }
};

// j-th z-derivative of the Robin inner integral
//   W_j(z) = int_0^inf [P_j(z-y) e^{-(z-y)^2/2t} + Q_j(z+y) e^{-(z+y)^2/2t}] g_odd(y) dy
double robin_inner(const TestFunction& g, const InnerPolys& polys, double t, double z,
                   double tol, int j) {
    const double u_max = g.tail_radius();
    const double w = kernel_width(t);
    const double hi = std::min(u_max, std::abs(z) + u_max + w);
    if (hi <= 0.0) return 0.0;
    return integrate(
        [&](double y) {
            const double wm = z - y, wp = z + y;
            const double km =
                InnerPolys::eval(polys.minus[j], wm) * std::exp(-wm * wm / (2.0 * t));
            const double kp =
                InnerPolys::eval(polys.plus[j], wp) * std::exp(-wp * wp / (2.0 * t));
            return (km + kp) * g_odd_deriv(g, y, 0);
        },
        0.0, hi, tol, tol * 1e-3, 4000, {std::abs(z)});
}

// nested evaluation of the damped half-line part:
//   U(x) = (2 pi t)^{-1/2} int_x^inf e^{-2 alpha (z-x)} W_0(z) dz
double robin_damped_nested(const TestFunction& g, const InnerPolys& polys, double t,
                           double alpha, double x, double tol) {
    const double u_max = g.tail_radius();
    // beyond either cutoff one factor of the integrand is negligible
    const double z_damp = x + 45.0 / (2.0 * alpha);
    const double z_tail = u_max + kernel_width(t) + 1.0;
    const double z_max = std::min(z_damp, std::max(z_tail, x + 1.0));
    if (z_max <= x) return 0.0;
    const double val = integrate(
        [&](double z) {
            return std::exp(-2.0 * alpha * (z - x)) * robin_inner(g, polys, t, z, tol * 0.1, 0);
        },
        x, z_max, tol, tol * 1e-3, 600);
    return val / std::sqrt(kTwoPi * t);
}

// derivatives of the damped part from the recursion U' = 2 alpha U - W_0/sqrt(2 pi t)
double robin_damped_deriv_nested(const TestFunction& g, double t, double alpha, double x,
                                 double tol, int order) {
    const InnerPolys polys(t, alpha, std::max(0, order - 1));
    double u = robin_damped_nested(g, polys, t, alpha, x, tol);
    for (int j = 0; j < order; ++j)
        u = 2.0 * alpha * u - robin_inner(g, polys, t, x, tol, j) / std::sqrt(kTwoPi * t);
    return u;
}

// --- erfcx-reduced route -------------------------------------------------
// Writing the damped part as int_x^inf e^{-2a(z-x)} (T^Dir_t v0)(z) dz with
// v0 = 2 alpha g_odd - g_odd' and swapping the integrals gives
//   U(x) = (1/2) int_0^inf v0(y) [R(x-y) - R(x+y)] dy,
//   R(w)  = e^{-w^2/2t} erfcx((w + 2 alpha t)/sqrt(2t)).

double robin_damped_reduced(const TestFunction& g, double t, double alpha, double x,
                            double tol) {
    const double u_max = g.tail_radius();
    auto rker = [&](double w) {
        return std::exp(-w * w / (2.0 * t)) * erfcx((w + 2.0 * alpha * t) / std::sqrt(2.0 * t));
    };
    return 0.5 * integrate(
                     [&](double y) {
                         const double v0 =
                             2.0 * alpha * g_odd_deriv(g, y, 0) - g_odd_deriv(g, y, 1);
                         return v0 * (rker(x - y) - rker(x + y));
                     },
                     0.0, u_max, tol, tol * 1e-3, 4000, {std::abs(x)});
}

// Dirichlet evolution of v0 = 2 alpha g_odd - g_odd', j-th derivative
double robin_dirichlet_piece(const TestFunction& g, double t, double alpha, double x,
                             double tol, int j) {
    const double u_max = g.tail_radius();
    const double w = kernel_width(t);
    const double hi = std::min(u_max, std::abs(x) + w);
    if (hi <= 0.0) return 0.0;
    return integrate(
        [&](double y) {
            const double v0 = 2.0 * alpha * g_odd_deriv(g, y, 0) - g_odd_deriv(g, y, 1);
            return (heat_deriv(x - y, t, j) - heat_deriv(x + y, t, j)) * v0;
        },
        0.0, hi, tol, tol * 1e-3, 4000, {std::abs(x)});
}

double robin_damped_deriv_reduced(const TestFunction& g, double t, double alpha, double x,
                                  double tol, int order) {
    double u = robin_damped_reduced(g, t, alpha, x, tol);
    for (int j = 0; j < order; ++j)
        u = 2.0 * alpha * u - robin_dirichlet_piece(g, t, alpha, x, tol, j);
    return u;
}

// half-line image-charge kernels (Neumann: +, Dirichlet: -) acting on the
// data of one side; x >= 0, data = g(side * y) for y > 0
double image_halfline_deriv(const TestFunction& g, double t, double x, double tol, int order,
                            int side, double image_sign) {
    const double u_max = g.tail_radius();
    const double w = kernel_width(t);
    const double hi = std::min(u_max, x + w);
    if (hi <= 0.0) return 0.0;
    return integrate(
        [&](double y) {
            return (heat_deriv(x - y, t, order) + image_sign * heat_deriv(x + y, t, order)) *
                   g.deriv(side * y, 0);
        },
        0.0, hi, tol, tol * 1e-3, 4000, {x});
}

class DerivShiftImpl final : public TestFunction::Impl {
public:
    explicit DerivShiftImpl(TestFunction base) : base_(std::move(base)) {}
    double deriv(double u, int k, int sgn) const override {
        if (k + 2 > TestFunction::kMaxDeriv)
            throw std::invalid_argument("second_derivative_view: order out of range");
        return sgn >= 0 && u == 0.0 ? base_.side_deriv(k + 2, +1)
               : (sgn < 0 && u == 0.0 ? base_.side_deriv(k + 2, -1) : base_.deriv(u, k + 2));
    }
    double tail_radius() const override { return base_.tail_radius(); }

private:
    TestFunction base_;
};

void check_spec(const KernelSpec& spec) {
    if (!(spec.quad_tol > 0.0 && spec.quad_tol <= 1e-4))
        throw std::invalid_argument("KernelSpec: quad_tol must lie in (0, 1e-4]");
    if (spec.kind == KernelSpec::Kind::Robin && !(spec.alpha > 0.0))
        throw std::invalid_argument("KernelSpec: Robin requires alpha > 0");
}

}  // namespace

KernelSpec kernel_for(const ModelParams& p, double quad_tol) {
    KernelSpec spec;
    spec.quad_tol = quad_tol;
    spec.alpha = p.alpha;
    if (p.beta < 1.0)
        spec.kind = KernelSpec::Kind::Free;
    else if (p.beta == 1.0)
        spec.kind = KernelSpec::Kind::Robin;
    else
        spec.kind = KernelSpec::Kind::Neumann;
    return spec;
}

double semigroup_deriv(const TestFunction& g, double t, double x, const KernelSpec& spec,
                       int order) {
    check_spec(spec);
    if (t < 0.0) throw std::invalid_argument("semigroup_deriv: negative time");
    if (order < 0 || order > TestFunction::kMaxDeriv)
        throw std::invalid_argument("semigroup_deriv: order out of range");
    if (t == 0.0) return g.deriv(x, order);
    if (t < kSmallT && order + 2 <= TestFunction::kMaxDeriv)
        return g.deriv(x, order) + 0.5 * t * g.deriv(x, order + 2);

    const double tol = spec.quad_tol;
    switch (spec.kind) {
        case KernelSpec::Kind::Free: {
            const double u_max = g.tail_radius();
            const double w = kernel_width(t);
            const double lo = std::max(-u_max, x - w), hi = std::min(u_max, x + w);
            if (lo >= hi) return 0.0;
            return integrate(
                [&](double y) { return heat_deriv(x - y, t, order) * g.deriv(y, 0); }, lo, hi,
                tol, tol * 1e-3, 4000, {0.0});
        }
        case KernelSpec::Kind::Neumann: {
            const int side = x >= 0.0 ? +1 : -1;
            const double sgn = (side == -1 && order % 2 == 1) ? -1.0 : 1.0;
            return sgn * image_halfline_deriv(g, t, std::abs(x), tol, order, side, +1.0);
        }
        case KernelSpec::Kind::Dirichlet: {
            const int side = x >= 0.0 ? +1 : -1;
            const double sgn = (side == -1 && order % 2 == 1) ? -1.0 : 1.0;
            return sgn * image_halfline_deriv(g, t, std::abs(x), tol, order, side, -1.0);
        }
        case KernelSpec::Kind::Robin: {
            const double even = even_part_deriv(g, t, x, tol, order);
            const double ax = std::abs(x);
            const double damped =
                robin_damped_deriv_nested(g, t, spec.alpha, ax, tol, order);
            if (x >= 0.0) return even + damped;
            const double sgn = (order % 2 == 1) ? -1.0 : 1.0;
            return even - sgn * damped;
        }
    }
    throw std::logic_error("semigroup_deriv: unknown kernel");
}

double robin_deriv_reduced(const TestFunction& g, double t, double x, double alpha,
                           double quad_tol, int order) {
    if (t == 0.0) return g.deriv(x, order);
    if (t < kSmallT && order + 2 <= TestFunction::kMaxDeriv)
        return g.deriv(x, order) + 0.5 * t * g.deriv(x, order + 2);
    const double even = even_part_deriv(g, t, x, quad_tol, order);
    const double damped = robin_damped_deriv_reduced(g, t, alpha, std::abs(x), quad_tol, order);
    if (x >= 0.0) return even + damped;
    return even - ((order % 2 == 1) ? -1.0 : 1.0) * damped;
}

TestFunction evolve_sampled(const TestFunction& g, double t, const KernelSpec& spec,
                            double sample_step) {
    check_spec(spec);
    const double radius = g.tail_radius() + kernel_width(t) + 1.0;
    const std::size_t nodes = static_cast<std::size_t>(std::ceil(radius / sample_step)) + 1;
    auto eval = [&](double x, int k) {
        if (spec.kind == KernelSpec::Kind::Robin)
            return robin_deriv_reduced(g, t, x, spec.alpha, spec.quad_tol, k);
        return semigroup_deriv(g, t, x, spec, k);
    };

    std::vector<std::vector<double>> right(TestFunction::kMaxDeriv + 1),
        left(TestFunction::kMaxDeriv + 1);
    for (int k = 0; k <= TestFunction::kMaxDeriv; ++k) {
        right[k].resize(nodes);
        left[k].resize(nodes);
    }
    for (std::size_t i = 0; i < nodes; ++i) {
        const double xi = sample_step * static_cast<double>(i);
        for (int k = 0; k <= TestFunction::kMaxDeriv; ++k) {
            right[k][i] = eval(xi, k);
            left[k][i] = eval(i == 0 ? -1e-300 : -xi, k);
        }
    }
    Regime regime = Regime::Smooth;
    if (spec.kind == KernelSpec::Kind::Robin) regime = Regime::Robin;
    if (spec.kind == KernelSpec::Kind::Neumann) regime = Regime::Neumann;
    return make_sampled_function(radius, sample_step, std::move(right), std::move(left),
                                 regime, spec.alpha);
}

TestFunction robin_smoothed(const TestFunction& seed, double s, double alpha,
                            double quad_tol, double sample_step) {
    if (!(s > 0.0)) throw std::invalid_argument("robin_smoothed: smoothing time s > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("robin_smoothed: alpha > 0");
    KernelSpec spec;
    spec.kind = KernelSpec::Kind::Robin;
    spec.alpha = alpha;
    spec.quad_tol = quad_tol;
    TestFunction out = evolve_sampled(seed, s, spec, sample_step);
    const double resid = boundary_residual(out, alpha, TestFunction::kMaxDeriv);
    if (resid > 1e-6)
        throw std::runtime_error("robin_smoothed: boundary residual " + std::to_string(resid) +
                                 " exceeds 1e-6");
    return out;
}

double ou_covariance(const TestFunction& phi, const TestFunction& psi, double t,
                     const ModelParams& p, double quad_tol) {
    const KernelSpec spec = kernel_for(p, quad_tol);
    const Regime want = regime_for(p);
    if (phi.regime() != want || psi.regime() != want)
        throw std::invalid_argument("ou_covariance: test-function regime does not match beta");
    const double u_max = psi.tail_radius();
    auto evolved = [&](double u) {
        if (spec.kind == KernelSpec::Kind::Robin)
            return robin_deriv_reduced(phi, t, u, spec.alpha, quad_tol, 0);
        return semigroup_deriv(phi, t, u, spec, 0);
    };
    const double integral = integrate([&](double u) { return evolved(u) * psi(u); }, -u_max,
                                      u_max, quad_tol * 10.0, 1e-12, 4000, {0.0});
    return p.chi() * integral;
}

double ou_variance(const TestFunction& phi, double t, const ModelParams& p,
                   const KernelSpec& spec, double time_rel_tol) {
    check_spec(spec);
    if (t == 0.0) return 0.0;
    const Regime want = regime_for(p);
    if (phi.regime() != want)
        throw std::invalid_argument("ou_variance: test-function regime does not match beta");

    auto grad = [&](double r, double u) {
        if (r == 0.0) return phi.deriv(u, 1);
        if (spec.kind == KernelSpec::Kind::Robin)
            return robin_deriv_reduced(phi, r, u, spec.alpha, spec.quad_tol, 1);
        return semigroup_deriv(phi, r, u, spec, 1);
    };
    auto integrand = [&](double r) {
        const double u_max = phi.tail_radius() + kernel_width(r) + 1.0;
        double v = integrate(
            [&](double u) { const double gkv = grad(r, u); return gkv * gkv; }, -u_max, u_max,
            spec.quad_tol * 100.0, 1e-12, 4000, {0.0});
        if (p.beta == 1.0) {
            const double g0 = grad(r, 0.0);
            v += g0 * g0 / p.alpha;
            if (p.gamma == 1.0) v += p.a * g0 * g0 / (p.alpha * p.alpha);
        }
        return v;
    };
    return integrate(integrand, 0.0, t, time_rel_tol, 1e-12, 200);
}

TestFunction second_derivative_view(const TestFunction& phi) {
    return TestFunction(std::make_shared<DerivShiftImpl>(phi), phi.regime(),
                        phi.robin_alpha());
}

}  // namespace slowbond
