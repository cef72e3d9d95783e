// estimators.hpp
// Path statistics realizing the limit-theorem checks: quadratic variation,
// the antisymmetric-current field B, the exact martingale residual, the
// second-order Boltzmann-Gibbs statistic and its bound, energy/quadratic
// processes, the slow-bond pair statistic and the two-block statistic.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slowbond/fields.hpp"
#include "slowbond/simulator.hpp"
#include "slowbond/stats.hpp"
#include "slowbond/test_function.hpp"

namespace slowbond {

// --- observable registration -------------------------------------------

void register_qv(SimSpec& spec, const std::string& id, const TestFunction& phi);
void register_b_field(SimSpec& spec, const std::string& id, const TestFunction& phi);
// (1/sqrt n) sum_x n^2 (L^S phi)(x/n) eta(x): the symmetric generator term
void register_symmetric_drift(SimSpec& spec, const std::string& id, const TestFunction& phi);
// centered pair at the slow bond, etabar(0) etabar(-1)
void register_pair_product(SimSpec& spec, const std::string& id);
void register_bg(SimSpec& spec, const std::string& id, const WeightSequence& v, int L);
void register_two_block(SimSpec& spec, const std::string& id, const TestFunction& phi,
                        int eps_n);
void register_energy_quad(SimSpec& spec, const std::string& id, const TestFunction& phi,
                          int eps_n);
void register_field_snapshot(SimSpec& spec, const std::string& id, const TestFunction& phi,
                             double tail_tol = 1e-5);

// --- per-path functionals ------------------------------------------------

inline double quadratic_variation(const PathRecord& rec, const std::string& id) {
    return rec.integral_of(id);
}
inline double b_field(const PathRecord& rec, const std::string& id) {
    return rec.integral_of(id);
}
// Y_end(phi) - Y_begin(phi) - int (symmetric drift) ds - B; an exact
// martingale of the ring dynamics when the Galilean shift vanishes.
double martingale_residual(const PathRecord& rec, const std::string& field_id,
                           std::size_t begin_index, std::size_t end_index,
                           const std::string& drift_id, const std::string& b_id);
// A^eps_{s,t} between two snapshot indices
inline double energy_quadratic(const PathRecord& rec, const std::string& id,
                               std::size_t i, std::size_t j) {
    return rec.integral_between(id, i, j);
}

// --- ensemble reductions (fixed replica order, deterministic) ------------

StatSummary summarize(const std::vector<PathRecord>& paths,
                      const std::function<double(const PathRecord&)>& f);
StatSummary square_summary(const std::vector<PathRecord>& paths, const std::string& id);

// --- Boltzmann-Gibbs bound ------------------------------------------------

struct BgSpec {
    WeightSequence v;
    int L = 1;
    double t = 0.0;
    ModelParams params;
};

// t { L/n + n^beta/(alpha n) + t n / L^2 } ||v||^2_{2,n}
//   + t { n^beta log2(L)^2 / (alpha n) } (1/n) sum_{x != -1} v^2(x),  C = 1
double bg_bound(const BgSpec& spec);

// Bound scale for the two-block statistic:
//   t * eps * sum_j (grad phi(j eps))^2 over the coarse grid
double two_block_bound_scale(const TestFunction& phi, int n, int eps_n, double t);

}  // namespace slowbond
