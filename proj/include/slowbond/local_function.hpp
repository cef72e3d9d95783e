// local_function.hpp
// Local functions of the occupation field as dense truth tables over a finite
// site window, plus the exact generator action, the stationarity residual
// E_{nu_rho}[L_n f], and the Dirichlet form with slow-bond coefficients.
#pragma once

#include <cstdint>
#include <vector>

#include "slowbond/params.hpp"

namespace slowbond {

// f depends on the occupancies of `support` (sorted, distinct sites of Z);
// table[m] is the value on the pattern whose bit j is the occupancy of
// support[j]. Dense tables keep every operation exact.
class LocalFunction {
public:
    LocalFunction() = default;
    LocalFunction(std::vector<int> support, std::vector<double> table);

    static LocalFunction constant(double c);
    // product eta(x1)...eta(xk)
    static LocalFunction occupation_product(const std::vector<int>& sites);

    const std::vector<int>& support() const { return support_; }
    const std::vector<double>& table() const { return table_; }

    // value on a pattern given by bits over `window` (a superset of support)
    double eval_in_window(const std::vector<int>& window, std::uint32_t pattern) const;

    bool is_constant() const { return support_.empty(); }

private:
    std::vector<int> support_;
    std::vector<double> table_;
};

// Exact L_n f by enumerating every swap that touches the support; the result
// lives on the support enlarged by one site on each side.
LocalFunction generator_apply(const ModelParams& p, const LocalFunction& f);

// E_{nu_rho}[L_n f], exact summation over window patterns with Bernoulli
// weights (compensated). Zero (to ~1e-13) for every local f and valid params.
double invariance_residual(const ModelParams& p, const LocalFunction& f);

// D_n(f) = sum over bonds of Xi^n_{x,x+1} I_{x,x+1}(f), with
// Xi = 1/2 + a/2n^gamma off the slow bond and alpha/2n^beta + a/2n^gamma on
// it, and I_{x,x+1}(f) = E_{nu_rho}[(f(eta)-f(eta^{x,x+1}))^2].
double dirichlet_form(const ModelParams& p, const LocalFunction& f);

// Single-bond squared-increment expectation I_{x,x+1}(f).
double bond_increment(const ModelParams& p, const LocalFunction& f, int bond_left_site);

}  // namespace slowbond
