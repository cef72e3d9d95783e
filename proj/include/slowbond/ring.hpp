// ring.hpp
// Occupation configuration on a ring of N sites embedding a window of the
// integer lattice. Logical sites run over [-N/2, ..., N-1-N/2]; the slow bond
// sits between logical sites -1 and 0. Bond x denotes {x, x+1}, with the
// single wrap bond {x_max, x_min} treated as a regular bond.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slowbond/params.hpp"
#include "slowbond/rng.hpp"

namespace slowbond {

class Ring {
public:
    explicit Ring(int num_sites) : n_(num_sites), occ_(num_sites, 0) {
        if (num_sites < 2) throw std::invalid_argument("Ring: need at least 2 sites");
        x_min_ = -(num_sites / 2);
    }

    int size() const { return n_; }
    int x_min() const { return x_min_; }
    int x_max() const { return x_min_ + n_ - 1; }

    // logical site -> storage index
    int index(int x) const { return x - x_min_; }
    int site_of_index(int i) const { return i + x_min_; }

    int occ(int x) const { return occ_[index(x)]; }
    int occ_index(int i) const { return occ_[i]; }
    void set(int x, int v) {
        particle_count_ += v - occ_[index(x)];
        occ_[index(x)] = static_cast<std::uint8_t>(v);
    }

    int particle_count() const { return particle_count_; }

    // bond b in [0, N): connects storage indices b and (b+1) mod N
    int bond_of_site(int x) const { return index(x); }
    int left_index_of_bond(int b) const { return b; }
    int right_index_of_bond(int b) const { return b + 1 == n_ ? 0 : b + 1; }
    int slow_bond() const { return index(-1); }

    // swap the contents of bond b; occupancy counts are preserved
    void swap_bond(int b) {
        const int i = left_index_of_bond(b);
        const int j = right_index_of_bond(b);
        std::swap(occ_[i], occ_[j]);
    }

    // i.i.d. Bernoulli(rho) occupancies
    void sample_bernoulli(double rho, PhiloxRng& rng) {
        particle_count_ = 0;
        for (auto& o : occ_) {
            o = rng.bernoulli(rho) ? 1 : 0;
            particle_count_ += o;
        }
    }

    void fill(int v) {
        for (auto& o : occ_) o = static_cast<std::uint8_t>(v);
        particle_count_ = v * n_;
    }

    const std::vector<std::uint8_t>& raw() const { return occ_; }

private:
    int n_;
    int x_min_;
    int particle_count_ = 0;
    std::vector<std::uint8_t> occ_;
};

// Total rate at which the contents of bond {x, x+1} swap:
//   p_b eta(x)(1-eta(x+1)) + q_b eta(x+1)(1-eta(x))
// with (p_b, q_b) = (1/2 +- a/2n^gamma) off the slow bond and
// (alpha/2n^beta +- a/2n^gamma) on it. Zero when the endpoints agree.
inline double swap_rate(const ModelParams& p, const Ring& ring, int bond) {
    const int l = ring.occ_index(ring.left_index_of_bond(bond));
    const int r = ring.occ_index(ring.right_index_of_bond(bond));
    if (l == r) return 0.0;
    const double sym = bond == ring.slow_bond() ? p.slow_half() : 0.5;
    const double drift = p.drift_half();
    return l == 1 ? sym + drift : sym - drift;
}

// Dominating per-bond rate for uniformization. The slow bond can exceed 1/2
// when alpha > n^beta, hence the max.
inline double uniformization_rate(const ModelParams& p) {
    return std::max(0.5, p.slow_half()) + p.drift_half();
}

}  // namespace slowbond
