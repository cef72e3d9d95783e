// exact.hpp
// Exact small-ring oracles: stationarity residual of the uniform measure on a
// particle-number sector, the dense generator on the full configuration
// space, and transition rows of exp(t n^2 Q) via the uniformization series.
#pragma once

#include <cstdint>
#include <vector>

#include "slowbond/params.hpp"

namespace slowbond {

// Max-norm of (uniform row vector) * Q on the k-particle sector of the
// N-ring with the slow bond included; <= ~1e-12 for valid params. N <= 14.
double ring_stationary_residual(const ModelParams& p, int ring_sites, int particles);

// Dense generator Q (row = from-state) on all 2^N configurations of the
// N-ring, bond rates as in swap_rate, NOT yet sped up by n^2. N <= 12.
std::vector<std::vector<double>> full_generator(const ModelParams& p, int ring_sites);

// Row `from` of exp(t n^2 Q): distribution of the sped-up chain at
// macroscopic time t started from configuration bitmask `from`.
// Poisson tail truncated below 1e-14.
std::vector<double> transition_row(const ModelParams& p, int ring_sites,
                                   std::uint32_t from, double t);

}  // namespace slowbond
