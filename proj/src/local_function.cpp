#include "slowbond/local_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slowbond/rng.hpp"

namespace slowbond {

namespace {

// total swap rate of bond {x, x+1} on Z given the two occupancies
double bond_rate(const ModelParams& p, int x, int occ_l, int occ_r) {
    if (occ_l == occ_r) return 0.0;
    const double sym = x == -1 ? p.slow_half() : 0.5;
    const double drift = p.drift_half();
    return occ_l == 1 ? sym + drift : sym - drift;
}

std::uint32_t bit(std::uint32_t pattern, int j) { return (pattern >> j) & 1u; }

}  // namespace

LocalFunction::LocalFunction(std::vector<int> support, std::vector<double> table)
    : support_(std::move(support)), table_(std::move(table)) {
    if (!std::is_sorted(support_.begin(), support_.end()) ||
        std::adjacent_find(support_.begin(), support_.end()) != support_.end())
        throw std::invalid_argument("LocalFunction: support must be sorted and distinct");
    if (support_.size() > 20)
        throw std::invalid_argument("LocalFunction: support too large for dense table");
    if (table_.size() != (std::size_t{1} << support_.size()))
        throw std::invalid_argument("LocalFunction: table must have 2^|support| entries");
}

LocalFunction LocalFunction::constant(double c) { return LocalFunction({}, {c}); }

LocalFunction LocalFunction::occupation_product(const std::vector<int>& sites) {
    std::vector<int> supp = sites;
    std::sort(supp.begin(), supp.end());
    supp.erase(std::unique(supp.begin(), supp.end()), supp.end());
    const std::size_t m = supp.size();
    std::vector<double> table(std::size_t{1} << m, 0.0);
    table[(std::size_t{1} << m) - 1] = 1.0;  // all occupied
    return LocalFunction(std::move(supp), std::move(table));
}

double LocalFunction::eval_in_window(const std::vector<int>& window,
                                     std::uint32_t pattern) const {
    std::uint32_t idx = 0;
    for (std::size_t j = 0; j < support_.size(); ++j) {
        const auto it = std::lower_bound(window.begin(), window.end(), support_[j]);
        if (it == window.end() || *it != support_[j])
            throw std::invalid_argument("eval_in_window: window does not cover support");
        idx |= bit(pattern, static_cast<int>(it - window.begin())) << j;
    }
    return table_[idx];
}

LocalFunction generator_apply(const ModelParams& p, const LocalFunction& f) {
    if (auto why = validate_params(p)) throw std::invalid_argument(*why);
    if (f.is_constant()) return LocalFunction::constant(0.0);

    const int lo = f.support().front() - 1;
    const int hi = f.support().back() + 1;
    std::vector<int> window;
    for (int x = lo; x <= hi; ++x) window.push_back(x);
    const int m = static_cast<int>(window.size());
    if (m > 20) throw std::invalid_argument("generator_apply: window overflow");

    // precompute positions of f's support inside the window
    std::vector<int> pos(f.support().size());
    for (std::size_t j = 0; j < f.support().size(); ++j)
        pos[j] = f.support()[j] - lo;
    auto feval = [&](std::uint32_t pattern) {
        std::uint32_t idx = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) idx |= bit(pattern, pos[j]) << j;
        return f.table()[idx];
    };

    std::vector<double> table(std::size_t{1} << m, 0.0);
    for (std::uint32_t pat = 0; pat < (1u << m); ++pat) {
        const double fv = feval(pat);
        double acc = 0.0;
        for (int x = lo; x < hi; ++x) {
            const int jl = x - lo, jr = jl + 1;
            const int ol = static_cast<int>(bit(pat, jl));
            const int orr = static_cast<int>(bit(pat, jr));
            const double rate = bond_rate(p, x, ol, orr);
            if (rate == 0.0) continue;
            const std::uint32_t swapped = pat ^ ((1u << jl) | (1u << jr));
            acc += rate * (feval(swapped) - fv);
        }
        table[pat] = acc;
    }
    return LocalFunction(std::move(window), std::move(table));
}

double invariance_residual(const ModelParams& p, const LocalFunction& f) {
    const LocalFunction lf = generator_apply(p, f);
    if (lf.is_constant()) return lf.table()[0];
    const int m = static_cast<int>(lf.support().size());
    KahanSum sum;
    for (std::uint32_t pat = 0; pat < (1u << m); ++pat) {
        double w = 1.0;
        for (int j = 0; j < m; ++j) w *= bit(pat, j) ? p.rho : 1.0 - p.rho;
        sum.add(w * lf.table()[pat]);
    }
    return sum.value();
}

double bond_increment(const ModelParams& p, const LocalFunction& f, int x) {
    if (f.is_constant()) return 0.0;
    // window = support plus the two bond endpoints
    std::vector<int> window = f.support();
    for (int s : {x, x + 1})
        if (!std::binary_search(window.begin(), window.end(), s)) window.push_back(s);
    std::sort(window.begin(), window.end());
    const int m = static_cast<int>(window.size());
    const int jl = static_cast<int>(std::lower_bound(window.begin(), window.end(), x) -
                                    window.begin());
    const int jr = static_cast<int>(std::lower_bound(window.begin(), window.end(), x + 1) -
                                    window.begin());
    KahanSum sum;
    for (std::uint32_t pat = 0; pat < (1u << m); ++pat) {
        if (bit(pat, jl) == bit(pat, jr)) continue;  // swap is a no-op
        double w = 1.0;
        for (int j = 0; j < m; ++j) w *= bit(pat, j) ? p.rho : 1.0 - p.rho;
        const std::uint32_t swapped = pat ^ ((1u << jl) | (1u << jr));
        const double d = f.eval_in_window(window, pat) - f.eval_in_window(window, swapped);
        sum.add(w * d * d);
    }
    return sum.value();
}

double dirichlet_form(const ModelParams& p, const LocalFunction& f) {
    if (auto why = validate_params(p)) throw std::invalid_argument(*why);
    if (f.is_constant()) return 0.0;
    const int lo = f.support().front() - 1;
    const int hi = f.support().back() + 1;
    if (hi - lo + 1 > 20) throw std::invalid_argument("dirichlet_form: window overflow");
    const double drift = p.drift_half();
    KahanSum sum;
    for (int x = lo; x < hi; ++x) {
        const double xi = (x == -1 ? p.slow_half() : 0.5) + drift;
        sum.add(xi * bond_increment(p, f, x));
    }
    return sum.value();
}

}  // namespace slowbond
