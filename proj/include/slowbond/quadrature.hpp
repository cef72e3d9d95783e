// quadrature.hpp
// Adaptive Gauss-Kronrod (G7,K15) integration on finite intervals with
// worst-interval bisection and QUADPACK-style error scaling.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>
#include <algorithm>

namespace slowbond {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// K15 abscissae on [0,1] and weights (QUADPACK values); even entries are the
// embedded G7 nodes.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
    double a, b;
    double value;
    double error;
};

template <typename F>
Interval gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    double resabs = std::abs(resk);
    for (int i = 0; i < 7; ++i) {
        const double s = fv[i] + fv[14 - i];
        resk += kWgk[i] * s;
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
        if (i % 2 == 1) resg += kWg[i / 2] * s;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    double err = std::abs((resk - resg) * h) * 200.0;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(err / resasc, 1.5));
    return Interval{a, b, resk * h, err};
}

}  // namespace detail

// Integrate f over [a,b]; optional interior break points (kinks, jumps).
// Converges when total error <= max(abs_tol, rel_tol*|integral|).
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-14, int max_intervals = 4000,
                 const std::vector<double>& breaks = {}) {
    if (a == b) return 0.0;
    std::vector<detail::Interval> segs;
    std::vector<double> pts{a};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i] < pts[i + 1]) segs.push_back(detail::gk15(f, pts[i], pts[i + 1]));

    while (true) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        double worst_err = -1.0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > worst_err) { worst_err = segs[i].error; worst = i; }
        }
        if (err <= std::max(abs_tol, rel_tol * std::abs(total))) return total;
        if (static_cast<int>(segs.size()) >= max_intervals)
            throw QuadratureError("adaptive quadrature failed to converge");
        const detail::Interval w = segs[worst];
        const double mid = 0.5 * (w.a + w.b);
        if (mid <= w.a || mid >= w.b)
            throw QuadratureError("adaptive quadrature: interval too small");
        segs[worst] = detail::gk15(f, w.a, mid);
        segs.push_back(detail::gk15(f, mid, w.b));
    }
}

}  // namespace slowbond
