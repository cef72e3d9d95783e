// params.hpp
// Model parameters of the weakly asymmetric exclusion process with a slow
// bond at {-1,0}. Off the slow bond a particle jumps right at rate
// 1/2 + a/(2 n^gamma) and left at 1/2 - a/(2 n^gamma); across the slow bond
// the 1/2 is replaced by alpha/(2 n^beta). Rates stay nonnegative iff
// gamma > beta, or beta = gamma with alpha >= a.
#pragma once

#include <cmath>
#include <optional>
#include <string>

namespace slowbond {

struct ModelParams {
    int n = 1;           // scaling parameter
    double alpha = 1.0;  // slow-bond strength, > 0
    double beta = 0.0;   // slow-bond exponent, >= 0
    double gamma = 1.0;  // asymmetry exponent, >= 1/2
    double a = 0.0;      // asymmetry amplitude, >= 0
    double rho = 0.5;    // density, in (0,1)

    double chi() const { return rho * (1.0 - rho); }

    // a / (2 n^gamma), the asymmetric half-rate
    double drift_half() const { return 0.5 * a / std::pow(static_cast<double>(n), gamma); }
    // alpha / (2 n^beta), the symmetric half-rate at the slow bond
    double slow_half() const { return 0.5 * alpha / std::pow(static_cast<double>(n), beta); }

    // Galilean transport velocity n^{2-gamma} a (1-2 rho); zero at rho = 1/2.
    double shift_velocity() const {
        return std::pow(static_cast<double>(n), 2.0 - gamma) * a * (1.0 - 2.0 * rho);
    }
};

// Returns std::nullopt when the parameters are admissible, otherwise the
// violated clause.
inline std::optional<std::string> validate_params(const ModelParams& p) {
    if (!(p.n >= 1)) return "n must be a positive integer";
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma) ||
        !std::isfinite(p.a) || !std::isfinite(p.rho))
        return "parameters must be finite";
    if (!(p.alpha > 0.0)) return "alpha must be > 0";
    if (!(p.beta >= 0.0)) return "beta must be >= 0";
    if (!(p.gamma >= 0.5)) return "gamma must be >= 1/2";
    if (!(p.a >= 0.0)) return "a must be >= 0";
    if (!(p.rho > 0.0 && p.rho < 1.0)) return "rho must lie in (0,1)";
    if (p.gamma < p.beta) return "positivity violated: gamma < beta";
    if (p.gamma == p.beta && p.alpha < p.a)
        return "positivity violated: beta = gamma requires alpha >= a";
    return std::nullopt;
}

inline bool params_valid(const ModelParams& p) { return !validate_params(p).has_value(); }

}  // namespace slowbond
