#include "slowbond/simulator.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "slowbond/fields.hpp"

namespace slowbond {

double PathRecord::integral_of(const std::string& id) const {
    const auto it = integral.find(id);
    if (it == integral.end())
        throw std::out_of_range("PathRecord: unknown integral observable '" + id + "'");
    return it->second;
}

double PathRecord::snapshot_of(const std::string& id, std::size_t time_index) const {
    const auto it = snapshot.find(id);
    if (it == snapshot.end())
        throw std::out_of_range("PathRecord: unknown snapshot observable '" + id + "'");
    if (time_index >= it->second.size())
        throw std::out_of_range("PathRecord: snapshot index out of range for '" + id + "'");
    return it->second[time_index];
}

double PathRecord::integral_between(const std::string& id, std::size_t i,
                                    std::size_t j) const {
    const auto it = integral_checkpoint.find(id);
    if (it == integral_checkpoint.end())
        throw std::out_of_range("PathRecord: no checkpoints for '" + id + "'");
    if (i > j || j >= it->second.size())
        throw std::out_of_range("PathRecord: checkpoint index out of range for '" + id + "'");
    return it->second[j] - it->second[i];
}

Engine::Engine(const SimSpec& spec, std::uint64_t stream)
    : spec_(spec), ring_(spec.ring_sites()), rng_(spec.seed, stream) {
    if (auto why = validate_params(spec.params)) throw std::invalid_argument(*why);
    if (spec.t_final < 0.0) throw std::invalid_argument("SimSpec: t_final >= 0 required");
    r_max_ = uniformization_rate(spec.params);
    const double n = static_cast<double>(spec.params.n);
    lambda_ = static_cast<double>(ring_.size()) * n * n * r_max_;
    for (const auto& [id, factory] : spec.integrals) {
        ids_.push_back(id);
        obs_.push_back(factory(ring_, spec.params));
        acc_.emplace_back();
    }
}

void Engine::reset_observables() {
    for (auto& o : obs_) o->reset(ring_);
    last_integrated_ = now_;
}

void Engine::integrate_to(double t) {
    const double dt = t - last_integrated_;
    if (dt > 0.0) {
        for (std::size_t i = 0; i < obs_.size(); ++i) acc_[i].add(obs_[i]->value() * dt);
        last_integrated_ = t;
    }
}

void Engine::advance(double dt) {
    if (dt < 0.0) throw std::invalid_argument("advance: dt >= 0 required");
    const double t_end = now_ + dt;
    const ModelParams& p = spec_.params;
    const int nn = ring_.size();
    while (true) {
        const double tau = rng_.exponential(lambda_);
        if (now_ + tau >= t_end) break;
        now_ += tau;
        const int b = static_cast<int>(rng_.below(static_cast<std::uint64_t>(nn)));
        const double rate = swap_rate(p, ring_, b);
        if (rate <= 0.0) continue;
        if (rate < r_max_ && rng_.uniform() * r_max_ >= rate) continue;
        integrate_to(now_);
        ring_.swap_bond(b);
        for (auto& o : obs_) o->on_swap(ring_, b);
    }
    now_ = t_end;
    integrate_to(t_end);
}

void Engine::take_snapshot() {
    for (const auto& s : spec_.snapshots)
        snaps_[s.id].push_back(
            fluctuation_field(ring_, s.phi, spec_.params, now_, s.tail_tol));
    for (std::size_t i = 0; i < ids_.size(); ++i)
        checkpoints_[ids_[i]].push_back(acc_[i].value());
    snap_times_taken_.push_back(now_);
}

PathRecord Engine::finish() const {
    PathRecord rec;
    rec.elapsed = now_;
    for (std::size_t i = 0; i < ids_.size(); ++i) rec.integral[ids_[i]] = acc_[i].value();
    rec.snapshot = snaps_;
    rec.integral_checkpoint = checkpoints_;
    rec.final_particle_count = ring_.particle_count();
    rec.final_occ_origin = ring_.occ(0);
    if (ring_.size() <= 64) {
        std::uint64_t bits = 0;
        for (int i = 0; i < ring_.size(); ++i)
            if (ring_.occ_index(i)) bits |= std::uint64_t{1} << i;
        rec.final_state_bits = bits;
    }
    return rec;
}

PathRecord run_path(const SimSpec& spec, std::uint64_t replica_index) {
    Engine eng(spec, replica_index);
    if (spec.initial_occupancy.empty()) {
        eng.mutable_ring().sample_bernoulli(spec.params.rho, eng.rng());
    } else {
        if (static_cast<int>(spec.initial_occupancy.size()) != eng.ring().size())
            throw std::invalid_argument("SimSpec: initial occupancy size mismatch");
        Ring& ring = eng.mutable_ring();
        for (int i = 0; i < ring.size(); ++i)
            ring.set(ring.site_of_index(i), spec.initial_occupancy[i]);
    }
    eng.reset_observables();
    double prev = 0.0;
    for (double ts : spec.snapshot_times) {
        if (ts < prev || ts > spec.t_final)
            throw std::invalid_argument("SimSpec: snapshot times must be sorted within [0, T]");
        eng.advance(ts - prev);
        eng.take_snapshot();
        prev = ts;
    }
    eng.advance(spec.t_final - prev);
    return eng.finish();
}

std::vector<PathRecord> run_paths(const SimSpec& spec, int replicas) {
    if (replicas < 1) throw std::invalid_argument("run_paths: need at least one replica");
    std::vector<PathRecord> out(replicas);
    const int workers = std::min(worker_threads(), replicas);
    if (workers <= 1) {
        for (int r = 0; r < replicas; ++r) out[r] = run_path(spec, r);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int r = next.fetch_add(1);
                if (r >= replicas) return;
                out[r] = run_path(spec, static_cast<std::uint64_t>(r));
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

std::map<std::string, StatSummary> run_replicas(const SimSpec& spec, int replicas) {
    const auto paths = run_paths(spec, replicas);
    std::map<std::string, StatSummary> out;
    for (const auto& rec : paths) {  // fixed replica order
        for (const auto& [id, v] : rec.integral) out[id].add(v);
        for (const auto& [id, vs] : rec.snapshot)
            for (std::size_t k = 0; k < vs.size(); ++k)
                out[id + "@" + std::to_string(k)].add(vs[k]);
    }
    return out;
}

double estimated_events(const SimSpec& spec, int replicas) {
    const double n = static_cast<double>(spec.params.n);
    return static_cast<double>(spec.ring_sites()) * n * n * uniformization_rate(spec.params) *
           spec.t_final * static_cast<double>(replicas);
}

int worker_threads() {
    if (const char* env = std::getenv("SLOWBOND_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace slowbond
