#include "slowbond/exact.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "slowbond/ring.hpp"

namespace slowbond {

namespace {

// swap rate of ring bond b on a bitmask state (bit i = storage index i)
double mask_swap_rate(const ModelParams& p, const Ring& geom, std::uint32_t state, int b) {
    const int i = geom.left_index_of_bond(b);
    const int j = geom.right_index_of_bond(b);
    const int l = (state >> i) & 1u;
    const int r = (state >> j) & 1u;
    if (l == r) return 0.0;
    const double sym = b == geom.slow_bond() ? p.slow_half() : 0.5;
    return l == 1 ? sym + p.drift_half() : sym - p.drift_half();
}

std::uint32_t mask_swap(const Ring& geom, std::uint32_t state, int b) {
    const int i = geom.left_index_of_bond(b);
    const int j = geom.right_index_of_bond(b);
    return state ^ ((1u << i) | (1u << j));
}

}  // namespace

double ring_stationary_residual(const ModelParams& p, int ring_sites, int particles) {
    if (auto why = validate_params(p)) throw std::invalid_argument(*why);
    if (ring_sites < 2 || ring_sites > 14)
        throw std::invalid_argument("ring_stationary_residual: need 2 <= N <= 14");
    if (particles < 0 || particles > ring_sites)
        throw std::invalid_argument("ring_stationary_residual: bad particle count");
    const Ring geom(ring_sites);

    std::vector<std::uint32_t> states;
    for (std::uint32_t s = 0; s < (1u << ring_sites); ++s)
        if (std::popcount(s) == particles) states.push_back(s);
    const double u = 1.0 / static_cast<double>(states.size());

    // residual(sigma) = u * (inflow - outflow); inflow from sigma^b at bond b
    // arrives at rate mask_swap_rate(sigma^b, b).
    double worst = 0.0;
    for (std::uint32_t s : states) {
        double net = 0.0;
        for (int b = 0; b < ring_sites; ++b) {
            net += mask_swap_rate(p, geom, mask_swap(geom, s, b), b);
            net -= mask_swap_rate(p, geom, s, b);
        }
        worst = std::max(worst, std::abs(u * net));
    }
    return worst;
}

std::vector<std::vector<double>> full_generator(const ModelParams& p, int ring_sites) {
    if (auto why = validate_params(p)) throw std::invalid_argument(*why);
    if (ring_sites < 2 || ring_sites > 12)
        throw std::invalid_argument("full_generator: need 2 <= N <= 12");
    const Ring geom(ring_sites);
    const std::size_t m = std::size_t{1} << ring_sites;
    std::vector<std::vector<double>> q(m, std::vector<double>(m, 0.0));
    for (std::uint32_t s = 0; s < m; ++s) {
        double out = 0.0;
        for (int b = 0; b < ring_sites; ++b) {
            const double r = mask_swap_rate(p, geom, s, b);
            if (r == 0.0) continue;
            q[s][mask_swap(geom, s, b)] += r;
            out += r;
        }
        q[s][s] = -out;
    }
    return q;
}

std::vector<double> transition_row(const ModelParams& p, int ring_sites,
                                   std::uint32_t from, double t) {
    const auto q = full_generator(p, ring_sites);
    const std::size_t m = q.size();
    if (from >= m) throw std::invalid_argument("transition_row: bad initial state");

    // uniformization: P = I + Q/lam, row * exp(t n^2 Q) = sum_k pois(k) row P^k
    double lam = 0.0;
    for (std::size_t s = 0; s < m; ++s) lam = std::max(lam, -q[s][s]);
    const double horizon = t * static_cast<double>(p.n) * static_cast<double>(p.n);
    std::vector<double> dist(m, 0.0), cur(m, 0.0), nxt(m, 0.0);
    cur[from] = 1.0;
    if (lam == 0.0 || horizon == 0.0) return cur;

    const double mu = lam * horizon;
    double logw = -mu;  // log Poisson weight at k = 0
    double tail = 1.0;
    for (int k = 0;; ++k) {
        const double w = std::exp(logw);
        for (std::size_t s = 0; s < m; ++s) dist[s] += w * cur[s];
        tail -= w;
        if (tail < 1e-14 && k > mu) break;
        if (k > 100000) throw std::runtime_error("transition_row: series too long");
        // cur <- cur * P
        for (std::size_t s = 0; s < m; ++s) nxt[s] = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            if (cur[s] == 0.0) continue;
            const double base = cur[s];
            nxt[s] += base * (1.0 + q[s][s] / lam);
            for (std::size_t d = 0; d < m; ++d)
                if (d != s && q[s][d] != 0.0) nxt[d] += base * q[s][d] / lam;
        }
        cur.swap(nxt);
        logw += std::log(mu / (k + 1));
    }
    return dist;
}

}  // namespace slowbond
