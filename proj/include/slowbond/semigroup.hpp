// semigroup.hpp
// Closed-form heat semigroups on the line with free, Neumann, Dirichlet and
// Robin behaviour at the origin (generator (1/2) d^2/dx^2), spatial
// derivatives of the evolved data, and the Ornstein-Uhlenbeck covariance and
// variance predictors built from them.
#pragma once

#include "slowbond/params.hpp"
#include "slowbond/test_function.hpp"

namespace slowbond {

struct KernelSpec {
    enum class Kind { Free, Neumann, Dirichlet, Robin };
    Kind kind = Kind::Free;
    double alpha = 1.0;     // Robin coefficient
    double quad_tol = 1e-8; // relative quadrature tolerance, in (0, 1e-4]
};

// kernel matching the macroscopic regime of the parameters
KernelSpec kernel_for(const ModelParams& p, double quad_tol = 1e-8);

// (d/dx)^order (T_t g)(x); order 0 is the semigroup value. x = 0 is evaluated
// as the 0+ limit. t in [0, inf); below t = 1e-4 a second-order expansion in
// t replaces the near-singular quadrature (orders <= 2).
double semigroup_deriv(const TestFunction& g, double t, double x, const KernelSpec& spec,
                       int order);

inline double semigroup_apply(const TestFunction& g, double t, double x,
                              const KernelSpec& spec) {
    return semigroup_deriv(g, t, x, spec, 0);
}

// Same Robin kernel through the erfcx-reduced single integral; used for inner
// loops and cross-checked against the nested-quadrature route in tests.
double robin_deriv_reduced(const TestFunction& g, double t, double x, double alpha,
                           double quad_tol, int order);

// Smooth a seed with the Robin semigroup at time s; the result satisfies the
// Robin boundary conditions and is returned as a sampled test function
// (regime Robin). Throws when the boundary residual exceeds 1e-6.
TestFunction robin_smoothed(const TestFunction& seed, double s, double alpha,
                            double quad_tol = 1e-8, double sample_step = 0.02);

// T_t g with value and derivatives sampled onto a grid, usable as evolved
// data in further semigroup applications (no boundary validation).
TestFunction evolve_sampled(const TestFunction& g, double t, const KernelSpec& spec,
                            double sample_step = 0.02);

// chi(rho) * int (T_t phi)(u) psi(u) du: the stationary lag-t covariance
// prediction E[Y_t(phi) Y_0(psi)] in the regime of p.
double ou_covariance(const TestFunction& phi, const TestFunction& psi, double t,
                     const ModelParams& p, double quad_tol = 1e-8);

// int_0^t || nabla_beta T_r phi ||^2_{2,beta} dr, with the beta = 1 point
// mass of the norm (and its gamma = 1 reinforcement) included.
double ou_variance(const TestFunction& phi, double t, const ModelParams& p,
                   const KernelSpec& spec, double time_rel_tol = 1e-6);

// Derivative-shifted view: (d^2/du^2) phi as a test function of the same
// regime (supports derivative orders 0..2).
TestFunction second_derivative_view(const TestFunction& phi);

}  // namespace slowbond
