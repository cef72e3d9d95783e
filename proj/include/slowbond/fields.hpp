// fields.hpp
// Discrete fluctuation-field machinery: centered occupations, one-sided block
// averages, the density fluctuation field tested against a function, discrete
// derivatives, and finitely supported weight sequences.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "slowbond/params.hpp"
#include "slowbond/ring.hpp"

namespace slowbond {

inline double centered(const Ring& ring, int x, double rho) {
    return static_cast<double>(ring.occ(x)) - rho;
}

enum class Side { Right, Left };

// Right: (1/L) sum_{y=x+1}^{x+L} (eta(y)-rho); Left: (1/L) sum_{y=x-L}^{x-1}.
// The box must not wrap around the ring.
inline double empirical_average(const Ring& ring, int x, int L, double rho, Side side) {
    if (L < 1) throw std::invalid_argument("empirical_average: L >= 1 required");
    const int lo = side == Side::Right ? x + 1 : x - L;
    const int hi = side == Side::Right ? x + L : x - 1;
    if (lo < ring.x_min() || hi > ring.x_max())
        throw std::out_of_range("empirical_average: box overflows the ring window");
    int count = 0;
    for (int y = lo; y <= hi; ++y) count += ring.occ(y);
    return (static_cast<double>(count) - L * rho) / static_cast<double>(L);
}

// Y_t(phi) = n^{-1/2} sum_x (eta(x)-rho) phi((x - shift)/n) with the Galilean
// shift n^{2-gamma} a (1-2 rho) t; identically zero shift at rho = 1/2.
// Throws when |phi| exceeds tail_tol on the outermost sites (the ring window
// would then truncate non-negligible mass).
inline double fluctuation_field(const Ring& ring, const std::function<double(double)>& phi,
                                const ModelParams& p, double t, double tail_tol = 1e-5) {
    const double n = static_cast<double>(p.n);
    const double shift = p.shift_velocity() * t;
    if (tail_tol > 0.0) {
        // probe the first excluded points (|u| >= K/2) and one unit beyond
        for (int x : {ring.x_min() - 1 - p.n, ring.x_min() - 1, ring.x_max() + 1,
                      ring.x_max() + 1 + p.n}) {
            if (std::abs(phi((x - shift) / n)) > tail_tol)
                throw std::domain_error("fluctuation_field: test-function tail exceeds tolerance");
        }
    }
    double sum = 0.0;
    for (int x = ring.x_min(); x <= ring.x_max(); ++x)
        sum += (static_cast<double>(ring.occ(x)) - p.rho) * phi((x - shift) / n);
    return sum / std::sqrt(n);
}

// i_eps(x0)(y) = eps^{-1} 1_{x0 < y <= x0 + eps}
inline std::function<double(double)> box_indicator(double x0, double eps) {
    return [x0, eps](double y) { return (y > x0 && y <= x0 + eps) ? 1.0 / eps : 0.0; };
}

// nabla^n_x phi = n (phi((x+1)/n) - phi(x/n));
// delta^n_x phi = n^2 (phi((x+1)/n) - 2 phi(x/n) + phi((x-1)/n)).
inline double discrete_derivative(const std::function<double(double)>& phi, int x, int n,
                                  int order) {
    const double dn = static_cast<double>(n);
    if (order == 1) return dn * (phi((x + 1) / dn) - phi(x / dn));
    if (order == 2)
        return dn * dn * (phi((x + 1) / dn) - 2.0 * phi(x / dn) + phi((x - 1) / dn));
    throw std::invalid_argument("discrete_derivative: order must be 1 or 2");
}

// Finitely supported weights v on [x_lo, x_hi] with the two cached norms of
// the Boltzmann-Gibbs bound.
class WeightSequence {
public:
    WeightSequence(int x_lo, std::vector<double> values, int n)
        : x_lo_(x_lo), v_(std::move(values)), n_(n) {
        if (v_.empty()) throw std::invalid_argument("WeightSequence: empty support");
        double s = 0.0, s_off = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const double q = v_[i] * v_[i];
            s += q;
            if (x_lo_ + static_cast<int>(i) != -1) s_off += q;
        }
        norm_sq_2n_ = s / n_;
        norm_sq_2n_off_slow_ = s_off / n_;
    }

    static WeightSequence from_gradient(const std::function<double(double)>& phi, int n,
                                        int x_lo, int x_hi) {
        std::vector<double> v;
        v.reserve(x_hi - x_lo + 1);
        for (int x = x_lo; x <= x_hi; ++x) v.push_back(discrete_derivative(phi, x, n, 1));
        return WeightSequence(x_lo, std::move(v), n);
    }

    int x_lo() const { return x_lo_; }
    int x_hi() const { return x_lo_ + static_cast<int>(v_.size()) - 1; }
    int n() const { return n_; }
    double operator()(int x) const {
        return (x < x_lo() || x > x_hi()) ? 0.0 : v_[x - x_lo_];
    }
    // (1/n) sum v^2 and (1/n) sum_{x != -1} v^2
    double norm_sq_2n() const { return norm_sq_2n_; }
    double norm_sq_2n_off_slow() const { return norm_sq_2n_off_slow_; }

private:
    int x_lo_;
    std::vector<double> v_;
    int n_;
    double norm_sq_2n_ = 0.0;
    double norm_sq_2n_off_slow_ = 0.0;
};

}  // namespace slowbond
