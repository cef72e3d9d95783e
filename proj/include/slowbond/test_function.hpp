// test_function.hpp
// Members of the beta-dependent test-function classes: smooth (Schwartz),
// Robin (odd side derivatives at 0 equal alpha times the jump of the even
// ones), and Neumann (odd side derivatives vanish at 0). Functions carry
// two-sided evaluators for value and derivatives up to order 4; the value at
// u = 0 is the right limit.
#pragma once

#include <memory>
#include <vector>

#include "slowbond/params.hpp"

namespace slowbond {

enum class Regime { Smooth, Robin, Neumann };

inline Regime regime_for(const ModelParams& p) {
    if (p.beta < 1.0) return Regime::Smooth;
    if (p.beta == 1.0) return Regime::Robin;
    return Regime::Neumann;
}

class TestFunction {
public:
    static constexpr int kMaxDeriv = 4;

    struct Impl {
        virtual ~Impl() = default;
        // k-th derivative; sgn selects the side at u == 0
        virtual double deriv(double u, int k, int sgn) const = 0;
        virtual double tail_radius() const = 0;
    };

    TestFunction() = default;
    TestFunction(std::shared_ptr<const Impl> impl, Regime regime, double robin_alpha)
        : impl_(std::move(impl)), regime_(regime), robin_alpha_(robin_alpha) {}

    bool valid() const { return impl_ != nullptr; }

    double operator()(double u) const { return deriv(u, 0); }
    double deriv(double u, int k) const { return impl_->deriv(u, k, u >= 0.0 ? +1 : -1); }
    double side_value(int sgn) const { return impl_->deriv(0.0, 0, sgn); }
    double side_deriv(int k, int sgn) const { return impl_->deriv(0.0, k, sgn); }

    Regime regime() const { return regime_; }
    double robin_alpha() const { return robin_alpha_; }
    // radius beyond which value and derivatives are negligible (< ~1e-12)
    double tail_radius() const { return impl_->tail_radius(); }

    // sampled certificate for sup_u |(1+|u|^ell) d^k phi(u)|
    double seminorm(int k, int ell) const;

private:
    std::shared_ptr<const Impl> impl_;
    Regime regime_ = Regime::Smooth;
    double robin_alpha_ = 0.0;
};

// One half-line piece poly(u-center) * exp(-decay (u-center)^2); closed under
// differentiation, which keeps all side limits exact.
struct GaussianPiece {
    std::vector<double> poly{1.0};  // coefficients in powers of (u - center)
    double decay = 1.0;
    double center = 0.0;
};

TestFunction make_gaussian(double sigma);                    // exp(-u^2/(2 sigma^2))
TestFunction make_poly_gaussian(const GaussianPiece& piece); // smooth regime
TestFunction make_hermite_gaussian(int m);                   // H_m(u) exp(-u^2)
// A e^{-u^2} on u>0, B e^{-u^2} on u<0; all odd side derivatives vanish
TestFunction make_neumann_pair(double A, double B);
// general two-sided constructor; validates the declared regime to 1e-6
// unless validate == false
TestFunction make_two_piece(const GaussianPiece& left, const GaussianPiece& right,
                            Regime regime, double robin_alpha, bool validate = true);

// Function backed by per-order Hermite-spline samples on [-radius, radius],
// with exact side limits at 0. Used for semigroup-smoothed constructions.
TestFunction make_sampled_function(double radius, double step,
                                   std::vector<std::vector<double>> right_orders,
                                   std::vector<std::vector<double>> left_orders,
                                   Regime regime, double robin_alpha);

// Max violation of the declared regime's boundary conditions at 0 over
// derivative orders <= k_max: side-limit mismatches for Smooth, the Robin
// identities for Robin(alpha), vanishing odd side derivatives for Neumann.
double boundary_residual(const TestFunction& phi, double alpha, int k_max);

// ||phi||^2_{2,beta} per the beta-dependent norm: the squared L^2 norm plus,
// when beta = 1, phi(0+)^2/alpha (+ a phi(0+)^2/alpha^2 when gamma = 1).
double norm_sq_2beta(const TestFunction& phi, const ModelParams& p, double rel_tol = 1e-9);

// plain squared L^2 norm (split at 0)
double norm_sq_l2(const TestFunction& phi, double rel_tol = 1e-9);

// || nabla_beta phi ||^2_{2,beta}: the gradient run through the same norm,
// with phi'(0+) carrying the beta = 1 point mass
double grad_norm_sq_2beta(const TestFunction& phi, const ModelParams& p,
                          double rel_tol = 1e-9);

}  // namespace slowbond
