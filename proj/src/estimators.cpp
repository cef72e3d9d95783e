#include "slowbond/estimators.hpp"

#include <cmath>

namespace slowbond {

namespace {

std::function<double(double)> as_callable(const TestFunction& phi) {
    return [phi](double u) { return phi(u); };
}

}  // namespace

void register_qv(SimSpec& spec, const std::string& id, const TestFunction& phi) {
    spec.integrals.emplace_back(id, [f = as_callable(phi)](const Ring& ring,
                                                           const ModelParams& p) {
        return std::make_unique<QvIntegrand>(ring, p, f);
    });
}

void register_b_field(SimSpec& spec, const std::string& id, const TestFunction& phi) {
    spec.integrals.emplace_back(id, [f = as_callable(phi)](const Ring& ring,
                                                           const ModelParams& p) {
        return std::make_unique<BIntegrand>(ring, p, f);
    });
}

void register_symmetric_drift(SimSpec& spec, const std::string& id, const TestFunction& phi) {
    spec.integrals.emplace_back(id, [f = as_callable(phi)](const Ring& ring,
                                                           const ModelParams& p) {
        // c(x) = n^{3/2} sum_{bonds at x} zeta_bond (phi(nbr/n) - phi(x/n)),
        // with cyclic neighbours and the slow coefficient alpha/(2 n^beta)
        const double n = static_cast<double>(p.n);
        const int nn = ring.size();
        std::vector<double> coeff(nn, 0.0);
        for (int b = 0; b < nn; ++b) {
            const int li = ring.left_index_of_bond(b);
            const int ri = ring.right_index_of_bond(b);
            const double pl = f(ring.site_of_index(li) / n);
            const double pr = f(ring.site_of_index(ri) / n);
            const double zeta = b == ring.slow_bond() ? p.slow_half() : 0.5;
            coeff[li] += zeta * (pr - pl);
            coeff[ri] += zeta * (pl - pr);
        }
        for (auto& c : coeff) c *= n * n / std::sqrt(n);
        return std::make_unique<LinearSiteSum>(std::move(coeff));
    });
}

void register_pair_product(SimSpec& spec, const std::string& id) {
    spec.integrals.emplace_back(id, [](const Ring&, const ModelParams& p) {
        return std::make_unique<CenteredProduct>(std::vector<int>{-1, 0}, p.rho);
    });
}

void register_bg(SimSpec& spec, const std::string& id, const WeightSequence& v, int L) {
    spec.integrals.emplace_back(id, [v, L](const Ring& ring, const ModelParams& p) {
        return std::make_unique<BgIntegrand>(ring, p, v, L);
    });
}

void register_two_block(SimSpec& spec, const std::string& id, const TestFunction& phi,
                        int eps_n) {
    spec.integrals.emplace_back(
        id, [f = as_callable(phi), eps_n](const Ring& ring, const ModelParams& p) {
            return std::make_unique<TwoBlockIntegrand>(ring, p, f, eps_n);
        });
}

void register_energy_quad(SimSpec& spec, const std::string& id, const TestFunction& phi,
                          int eps_n) {
    spec.integrals.emplace_back(
        id, [f = as_callable(phi), eps_n](const Ring& ring, const ModelParams& p) {
            return std::make_unique<EnergyQuadIntegrand>(ring, p, f, eps_n);
        });
}

void register_field_snapshot(SimSpec& spec, const std::string& id, const TestFunction& phi,
                             double tail_tol) {
    SnapshotSpec s;
    s.id = id;
    s.phi = as_callable(phi);
    s.tail_tol = tail_tol;
    spec.snapshots.push_back(std::move(s));
}

double martingale_residual(const PathRecord& rec, const std::string& field_id,
                           std::size_t begin_index, std::size_t end_index,
                           const std::string& drift_id, const std::string& b_id) {
    const double dy =
        rec.snapshot_of(field_id, end_index) - rec.snapshot_of(field_id, begin_index);
    const double drift = rec.integral_between(drift_id, begin_index, end_index);
    const double b = rec.integral_between(b_id, begin_index, end_index);
    return dy - drift - b;
}

StatSummary summarize(const std::vector<PathRecord>& paths,
                      const std::function<double(const PathRecord&)>& f) {
    StatSummary s;
    for (const auto& rec : paths) s.add(f(rec));
    return s;
}

StatSummary square_summary(const std::vector<PathRecord>& paths, const std::string& id) {
    return summarize(paths, [&id](const PathRecord& rec) {
        const double v = rec.integral_of(id);
        return v * v;
    });
}

double bg_bound(const BgSpec& spec) {
    const ModelParams& p = spec.params;
    const double n = static_cast<double>(p.n);
    const double L = static_cast<double>(spec.L);
    const double nb = std::pow(n, p.beta);
    const double main_bracket = L / n + nb / (p.alpha * n) + spec.t * n / (L * L);
    const double log2l = std::log2(L);
    const double slow_bracket = nb * log2l * log2l / (p.alpha * n);
    return spec.t * main_bracket * spec.v.norm_sq_2n() +
           spec.t * slow_bracket * spec.v.norm_sq_2n_off_slow();
}

double two_block_bound_scale(const TestFunction& phi, int n, int eps_n, double t) {
    const double dn = static_cast<double>(n);
    const double eps = static_cast<double>(eps_n) / dn;
    double sum = 0.0;
    const int j_max = static_cast<int>(std::ceil(phi.tail_radius() / eps)) + 2;
    for (int j = -j_max; j <= j_max; ++j) {
        const double g = phi.deriv(eps * j, 1);
        sum += g * g;
    }
    return t * eps * sum;
}

}  // namespace slowbond
