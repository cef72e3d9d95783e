// observables.hpp
// Path observables maintained incrementally along the jump chain. Each keeps
// its current value with O(1) work per accepted swap; the engine integrates
// values exactly between events (the configuration is piecewise constant).
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "slowbond/fields.hpp"
#include "slowbond/params.hpp"
#include "slowbond/ring.hpp"

namespace slowbond {

class Observable {
public:
    virtual ~Observable() = default;
    virtual void reset(const Ring& ring) = 0;
    // called after the swap at `bond` has been applied
    virtual void on_swap(const Ring& ring, int bond) = 0;
    double value() const { return value_; }

protected:
    double value_ = 0.0;
};

using ObservableFactory =
    std::function<std::unique_ptr<Observable>(const Ring&, const ModelParams&)>;

namespace detail {

// logical endpoints of a bond (wrap bond returns the two edge sites)
inline std::pair<int, int> bond_sites(const Ring& ring, int bond) {
    return {ring.site_of_index(ring.left_index_of_bond(bond)),
            ring.site_of_index(ring.right_index_of_bond(bond))};
}

}  // namespace detail

// sum_x c(x) eta(x) over the whole ring
class LinearSiteSum : public Observable {
public:
    explicit LinearSiteSum(std::vector<double> coeff) : coeff_(std::move(coeff)) {}

    void reset(const Ring& ring) override {
        if (static_cast<int>(coeff_.size()) != ring.size())
            throw std::invalid_argument("LinearSiteSum: coefficient size mismatch");
        value_ = 0.0;
        for (int i = 0; i < ring.size(); ++i)
            if (ring.occ_index(i)) value_ += coeff_[i];
    }
    void on_swap(const Ring& ring, int bond) override {
        const int li = ring.left_index_of_bond(bond);
        const int ri = ring.right_index_of_bond(bond);
        const int dl = ring.occ_index(li) - ring.occ_index(ri);  // new - old at left
        value_ += dl * (coeff_[li] - coeff_[ri]);
    }

private:
    std::vector<double> coeff_;
};

// product of centered occupations over a fixed small set of sites
class CenteredProduct : public Observable {
public:
    CenteredProduct(std::vector<int> sites, double rho) : sites_(std::move(sites)), rho_(rho) {}

    void reset(const Ring& ring) override { value_ = product(ring); }
    void on_swap(const Ring& ring, int bond) override {
        const auto [s1, s2] = detail::bond_sites(ring, bond);
        for (int s : sites_)
            if (s == s1 || s == s2) { value_ = product(ring); return; }
    }

private:
    double product(const Ring& ring) const {
        double v = 1.0;
        for (int s : sites_) v *= static_cast<double>(ring.occ(s)) - rho_;
        return v;
    }
    std::vector<int> sites_;
    double rho_;
};

// Quadratic-variation integrand of the field martingale:
//   (1/2n) [ sum_{bonds != slow} G (grad phi)^2 + H (grad phi at slow)^2 ],
// G = (eta(x+1)-eta(x))^2 + (a/n^gamma) eta(x+1)(1-eta(x)) off the slow bond,
// H = (alpha/n^beta + a/n^gamma) (eta(-1)-eta(0))^2 on it.
class QvIntegrand : public Observable {
public:
    QvIntegrand(const Ring& ring, const ModelParams& p,
                const std::function<double(double)>& phi) {
        const int nn = ring.size();
        gsq_.resize(nn);
        term_.assign(nn, 0.0);
        const double n = static_cast<double>(p.n);
        for (int b = 0; b < nn; ++b) {
            const int xl = ring.site_of_index(ring.left_index_of_bond(b));
            const int xr = ring.site_of_index(ring.right_index_of_bond(b));
            const double g = n * (phi(xr / n) - phi(xl / n));
            gsq_[b] = g * g;
        }
        ca_ = p.a / std::pow(n, p.gamma);
        calpha_ = p.alpha / std::pow(n, p.beta);
        inv2n_ = 0.5 / n;
        slow_ = ring.slow_bond();
    }

    void reset(const Ring& ring) override {
        value_ = 0.0;
        for (int b = 0; b < ring.size(); ++b) {
            term_[b] = bond_term(ring, b);
            value_ += term_[b];
        }
    }
    void on_swap(const Ring& ring, int bond) override {
        const int nn = ring.size();
        for (int d = -1; d <= 1; ++d) {
            const int b = (bond + d + nn) % nn;
            const double t = bond_term(ring, b);
            value_ += t - term_[b];
            term_[b] = t;
        }
    }

private:
    double bond_term(const Ring& ring, int b) const {
        const int l = ring.occ_index(ring.left_index_of_bond(b));
        const int r = ring.occ_index(ring.right_index_of_bond(b));
        const double dsq = static_cast<double>((l - r) * (l - r));
        const double g = b == slow_ ? (calpha_ + ca_) * dsq
                                    : dsq + ca_ * r * (1 - l);
        return inv2n_ * g * gsq_[b];
    }

    std::vector<double> gsq_, term_;
    double ca_, calpha_, inv2n_;
    int slow_;
};

// Antisymmetric-current integrand:
//   sum_x tau_x F (grad^n_x phi), F = (a sqrt n / 2 n^gamma)((eta(1)-eta(0))^2 - 2 chi)
class BIntegrand : public Observable {
public:
    BIntegrand(const Ring& ring, const ModelParams& p,
               const std::function<double(double)>& phi) {
        const int nn = ring.size();
        grad_.resize(nn);
        term_.assign(nn, 0.0);
        const double n = static_cast<double>(p.n);
        for (int b = 0; b < nn; ++b) {
            const int xl = ring.site_of_index(ring.left_index_of_bond(b));
            const int xr = ring.site_of_index(ring.right_index_of_bond(b));
            grad_[b] = n * (phi(xr / n) - phi(xl / n));
        }
        cf_ = 0.5 * p.a * std::sqrt(n) / std::pow(n, p.gamma);
        two_chi_ = 2.0 * p.chi();
    }

    void reset(const Ring& ring) override {
        value_ = 0.0;
        for (int b = 0; b < ring.size(); ++b) {
            term_[b] = bond_term(ring, b);
            value_ += term_[b];
        }
    }
    void on_swap(const Ring& ring, int bond) override {
        const int nn = ring.size();
        for (int d = -1; d <= 1; ++d) {
            const int b = (bond + d + nn) % nn;
            const double t = bond_term(ring, b);
            value_ += t - term_[b];
            term_[b] = t;
        }
    }

private:
    double bond_term(const Ring& ring, int b) const {
        const int l = ring.occ_index(ring.left_index_of_bond(b));
        const int r = ring.occ_index(ring.right_index_of_bond(b));
        return cf_ * (static_cast<double>((r - l) * (r - l)) - two_chi_) * grad_[b];
    }

    std::vector<double> grad_, term_;
    double cf_, two_chi_;
};

// Boltzmann-Gibbs integrand:
//   sum_x v(x) { etabar(x) etabar(x+1) - (right block average over L)^2 + chi/L }
class BgIntegrand : public Observable {
public:
    BgIntegrand(const Ring& ring, const ModelParams& p, const WeightSequence& v, int L)
        : v_(v), L_(L), rho_(p.rho), chi_over_l_(p.chi() / L) {
        if (v_.x_hi() + L_ + 1 > ring.x_max() || v_.x_lo() - 1 < ring.x_min())
            throw std::invalid_argument("BgIntegrand: support plus box overflows the window");
        count_.assign(v_.x_hi() - v_.x_lo() + 1, 0);
        term_.assign(count_.size(), 0.0);
    }

    void reset(const Ring& ring) override {
        value_ = 0.0;
        for (int x = v_.x_lo(); x <= v_.x_hi(); ++x) {
            int c = 0;
            for (int y = x + 1; y <= x + L_; ++y) c += ring.occ(y);
            count_[x - v_.x_lo()] = c;
            term_[x - v_.x_lo()] = term_for(ring, x);
            value_ += term_[x - v_.x_lo()];
        }
    }
    void on_swap(const Ring& ring, int bond) override {
        const auto [s1, s2] = detail::bond_sites(ring, bond);
        if (s2 == s1 + 1) {
            // adjacent swap: block counts only change at the two boundary windows
            const int d1 = delta(ring, s1, s2);
            touch_count(s1 - L_, d1);
            touch_count(s2 - 1, -d1);  // window (s2-1, s2-1+L] gained site s2
            refresh(ring, s1 - L_);
            refresh(ring, s2 - 1);
        } else {
            // wrap bond: windows never reach the seam by construction, but stay exact
            for (int s : {s1, s2}) {
                const int d = ring.occ(s) == 1 ? 1 : -1;
                for (int x = s - L_; x <= s - 1; ++x) touch_count(x, d);
                for (int x = s - L_; x <= s - 1; ++x) refresh(ring, x);
            }
        }
        for (int x = s1 - 1; x <= s1 + 1; ++x) refresh(ring, x);
        for (int x = s2 - 1; x <= s2 + 1; ++x) refresh(ring, x);
    }

private:
    // occupancy delta at site s1 after swapping s1 <-> s2
    static int delta(const Ring& ring, int s1, int s2) {
        return ring.occ(s1) - ring.occ(s2);
    }
    void touch_count(int x, int d) {
        if (x >= v_.x_lo() && x <= v_.x_hi()) count_[x - v_.x_lo()] += d;
    }
    double term_for(const Ring& ring, int x) const {
        const double eb0 = static_cast<double>(ring.occ(x)) - rho_;
        const double eb1 = static_cast<double>(ring.occ(x + 1)) - rho_;
        const double avg =
            (static_cast<double>(count_[x - v_.x_lo()]) - L_ * rho_) / static_cast<double>(L_);
        return v_(x) * (eb0 * eb1 - avg * avg + chi_over_l_);
    }
    void refresh(const Ring& ring, int x) {
        if (x < v_.x_lo() || x > v_.x_hi()) return;
        const double t = term_for(ring, x);
        value_ += t - term_[x - v_.x_lo()];
        term_[x - v_.x_lo()] = t;
    }

    WeightSequence v_;
    int L_;
    double rho_, chi_over_l_;
    std::vector<int> count_;
    std::vector<double> term_;
};

// Two-block comparison on the coarse grid:
//   sqrt(n) sum_j grad phi(j eps) { block avg at j - block avg at j+1 }
class TwoBlockIntegrand : public Observable {
public:
    TwoBlockIntegrand(const Ring& ring, const ModelParams& p,
                      const std::function<double(double)>& phi, int eps_n)
        : eps_n_(eps_n), rho_(p.rho) {
        if (eps_n_ < 1) throw std::invalid_argument("TwoBlockIntegrand: eps*n >= 1 required");
        // blocks j cover sites (j eps_n, (j+1) eps_n]; terms need blocks j and j+1
        j_lo_ = floor_div(ring.x_min() - 1, eps_n_) + 1;
        j_hi_ = floor_div(ring.x_max(), eps_n_) - 2;
        if (j_hi_ < j_lo_) throw std::invalid_argument("TwoBlockIntegrand: ring too small");
        const double n = static_cast<double>(p.n);
        sqrt_n_ = std::sqrt(n);
        grad_.resize(j_hi_ - j_lo_ + 1);
        for (int j = j_lo_; j <= j_hi_; ++j)
            grad_[j - j_lo_] = (phi((static_cast<double>(j + 1) * eps_n_) / n) -
                                phi((static_cast<double>(j) * eps_n_) / n)) *
                               n / static_cast<double>(eps_n_);
        block_.assign(j_hi_ - j_lo_ + 2, 0);
        term_.assign(j_hi_ - j_lo_ + 1, 0.0);
    }

    void reset(const Ring& ring) override {
        value_ = 0.0;
        for (int j = j_lo_; j <= j_hi_ + 1; ++j) {
            int c = 0;
            for (int y = j * eps_n_ + 1; y <= (j + 1) * eps_n_; ++y) c += ring.occ(y);
            block_[j - j_lo_] = c;
        }
        for (int j = j_lo_; j <= j_hi_; ++j) {
            term_[j - j_lo_] = term_for(j);
            value_ += term_[j - j_lo_];
        }
    }
    void on_swap(const Ring& ring, int bond) override {
        const auto [s1, s2] = detail::bond_sites(ring, bond);
        const int j1 = floor_div(s1 - 1, eps_n_);
        const int j2 = floor_div(s2 - 1, eps_n_);
        if (j1 == j2) return;  // interior swap leaves block counts unchanged
        touch_block(j1, ring.occ(s1) == 1 ? 1 : -1);
        touch_block(j2, ring.occ(s2) == 1 ? 1 : -1);
        for (int j : {j1 - 1, j1, j2 - 1, j2}) refresh(j);
    }

private:
    static int floor_div(int a, int b) {
        int q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
        return q;
    }
    void touch_block(int j, int d) {
        if (j >= j_lo_ && j <= j_hi_ + 1) block_[j - j_lo_] += d;
    }
    double term_for(int j) const {
        const double avg_j =
            (static_cast<double>(block_[j - j_lo_]) - eps_n_ * rho_) / eps_n_;
        const double avg_j1 =
            (static_cast<double>(block_[j + 1 - j_lo_]) - eps_n_ * rho_) / eps_n_;
        return sqrt_n_ * grad_[j - j_lo_] * (avg_j - avg_j1);
    }
    void refresh(int j) {
        if (j < j_lo_ || j > j_hi_) return;
        const double t = term_for(j);
        value_ += t - term_[j - j_lo_];
        term_[j - j_lo_] = t;
    }

    int eps_n_, j_lo_, j_hi_;
    double rho_, sqrt_n_;
    std::vector<double> grad_, term_;
    std::vector<int> block_;
};

// Regularized quadratic field: sum_k (right block avg over eps*n at k)^2 grad phi(k/n),
// the integrand of the A^eps process evaluated on the lattice.
class EnergyQuadIntegrand : public Observable {
public:
    EnergyQuadIntegrand(const Ring& ring, const ModelParams& p,
                        const std::function<double(double)>& phi, int eps_n)
        : eps_n_(eps_n), rho_(p.rho) {
        if (eps_n_ < 1) throw std::invalid_argument("EnergyQuadIntegrand: eps*n >= 1");
        k_lo_ = ring.x_min();
        k_hi_ = ring.x_max() - eps_n_;
        const double n = static_cast<double>(p.n);
        grad_.resize(k_hi_ - k_lo_ + 1);
        for (int k = k_lo_; k <= k_hi_; ++k)
            grad_[k - k_lo_] = n * (phi((k + 1) / n) - phi(k / n));
        count_.assign(k_hi_ - k_lo_ + 1, 0);
        term_.assign(k_hi_ - k_lo_ + 1, 0.0);
    }

    void reset(const Ring& ring) override {
        value_ = 0.0;
        int c = 0;
        for (int y = k_lo_ + 1; y <= k_lo_ + eps_n_; ++y) c += ring.occ(y);
        for (int k = k_lo_; k <= k_hi_; ++k) {
            count_[k - k_lo_] = c;
            term_[k - k_lo_] = term_for(k);
            value_ += term_[k - k_lo_];
            if (k < k_hi_) c += ring.occ(k + 1 + eps_n_) - ring.occ(k + 1);
        }
    }
    void on_swap(const Ring& ring, int bond) override {
        const auto [s1, s2] = detail::bond_sites(ring, bond);
        if (s2 == s1 + 1) {
            const int d1 = ring.occ(s1) == 1 ? 1 : -1;
            touch(s1 - eps_n_, d1);
            touch(s2 - 1, -d1);
            refresh(s1 - eps_n_);
            refresh(s2 - 1);
        } else {
            for (int s : {s1, s2}) {
                const int d = ring.occ(s) == 1 ? 1 : -1;
                for (int k = s - eps_n_; k <= s - 1; ++k) touch(k, d);
                for (int k = s - eps_n_; k <= s - 1; ++k) refresh(k);
            }
        }
    }

private:
    double term_for(int k) const {
        const double avg =
            (static_cast<double>(count_[k - k_lo_]) - eps_n_ * rho_) / eps_n_;
        return avg * avg * grad_[k - k_lo_];
    }
    void touch(int k, int d) {
        if (k >= k_lo_ && k <= k_hi_) count_[k - k_lo_] += d;
    }
    void refresh(int k) {
        if (k < k_lo_ || k > k_hi_) return;
        const double t = term_for(k);
        value_ += t - term_[k - k_lo_];
        term_[k - k_lo_] = t;
    }

    int eps_n_, k_lo_, k_hi_;
    double rho_;
    std::vector<double> grad_, term_;
    std::vector<int> count_;
};

}  // namespace slowbond
