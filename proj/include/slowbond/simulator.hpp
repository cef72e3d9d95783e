// simulator.hpp
// Exact-in-law continuous-time simulation of the sped-up process eta_{t n^2}
// by uniformization: a dominating Poisson clock of rate N n^2 r_max proposes
// a uniform bond per tick and accepts the swap with probability rate/r_max.
// Registered observables are integrated exactly between accepted swaps.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "slowbond/observables.hpp"
#include "slowbond/params.hpp"
#include "slowbond/ring.hpp"
#include "slowbond/rng.hpp"
#include "slowbond/stats.hpp"

namespace slowbond {

struct SnapshotSpec {
    std::string id;
    std::function<double(double)> phi;
    double tail_tol = 1e-5;
};

struct SimSpec {
    ModelParams params;
    int lattice_factor = 8;  // ring has K * n sites
    double t_final = 0.0;
    std::uint64_t seed = 1;
    std::vector<double> snapshot_times;  // sorted; fluctuation-field readouts
    std::vector<std::pair<std::string, ObservableFactory>> integrals;
    std::vector<SnapshotSpec> snapshots;
    // fixed start instead of the Bernoulli(rho) draw (law-exactness oracles)
    std::vector<std::uint8_t> initial_occupancy;

    int ring_sites() const { return lattice_factor * params.n; }
};

struct PathRecord {
    double elapsed = 0.0;
    std::map<std::string, double> integral;  // exact int_0^T value dt
    // snapshot values: key -> one value per snapshot time
    std::map<std::string, std::vector<double>> snapshot;
    // running integral value at each snapshot time (same order)
    std::map<std::string, std::vector<double>> integral_checkpoint;
    std::uint64_t final_state_bits = 0;  // packed occupancy when N <= 64
    int final_particle_count = 0;
    int final_occ_origin = 0;  // occupancy of logical site 0 at t_final

    double integral_of(const std::string& id) const;
    double snapshot_of(const std::string& id, std::size_t time_index) const;
    // exact int over [snapshot time i, snapshot time j]
    double integral_between(const std::string& id, std::size_t i, std::size_t j) const;
};

// Single-path engine; advance() may be called repeatedly (exact by the
// memoryless property of the dominating clock).
class Engine {
public:
    Engine(const SimSpec& spec, std::uint64_t stream);

    void advance(double dt);
    double now() const { return now_; }
    const Ring& ring() const { return ring_; }
    Ring& mutable_ring() { return ring_; }
    void reset_observables();
    void take_snapshot();
    PathRecord finish() const;

    PhiloxRng& rng() { return rng_; }

private:
    void integrate_to(double t);

    const SimSpec spec_;
    Ring ring_;
    PhiloxRng rng_;
    double r_max_;
    double lambda_;
    double now_ = 0.0;
    double last_integrated_ = 0.0;
    std::vector<std::string> ids_;
    std::vector<std::unique_ptr<Observable>> obs_;
    std::vector<KahanSum> acc_;
    std::map<std::string, std::vector<double>> snaps_;
    std::map<std::string, std::vector<double>> checkpoints_;
    std::vector<double> snap_times_taken_;
};

// Runs one full replica: Bernoulli(rho) start, snapshots at the listed
// times, advance to t_final.
PathRecord run_path(const SimSpec& spec, std::uint64_t replica_index);

// R independent replicas (streams derived from spec.seed and the replica
// index); thread-parallel, results independent of scheduling.
std::vector<PathRecord> run_paths(const SimSpec& spec, int replicas);

// Per-observable summaries merged in fixed replica order (bit-identical for
// a fixed seed regardless of thread count).
std::map<std::string, StatSummary> run_replicas(const SimSpec& spec, int replicas);

// K*T*n^3-type cost estimate: expected dominating-clock ticks for R replicas.
double estimated_events(const SimSpec& spec, int replicas);

// thread budget: SLOWBOND_THREADS when set, else hardware concurrency
int worker_threads();

}  // namespace slowbond
