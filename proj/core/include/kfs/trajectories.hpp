#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kfs/rng.hpp"

namespace kfs {

// Everything one trajectory reports. `values` and `accepted` are indexed
// like the observable list handed to run_trajectories; a rejected entry is
// excluded from that observable's mean.
struct SnapshotRecord {
    long long trajectory = 0;
    std::uint64_t seed = 0;
    std::vector<int> ancilla_outcomes;
    std::vector<int> column_parities;
    std::vector<int> lost_sites;
    std::string frame;
    std::vector<double> values;
    std::vector<char> accepted;
    std::string metadata;
};

enum class IntervalMethod { Normal, Bootstrap };

struct TrajectoryOptions {
    long long n = 1;
    std::uint64_t seed = 0;
    int workers = 1;
    bool keep_snapshots = false;
    IntervalMethod interval = IntervalMethod::Normal;
    int bootstrap_resamples = 400;
    // Two-sided coverage of the reported interval.
    double confidence = 0.68;
};

struct ObservableSummary {
    std::string name;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long long accepted = 0;
    long long total = 0;
    double acceptance_fraction() const { return total > 0 ? double(accepted) / double(total) : 0.0; }
};

struct TrajectorySet {
    std::vector<std::string> observables;
    std::vector<SnapshotRecord> snapshots;  // empty unless keep_snapshots
    std::vector<ObservableSummary> summary;
};

// Called once per trajectory with the stream substream(seed, index, trajectory).
using TrajectoryFn = std::function<SnapshotRecord(long long index, Rng& rng)>;

// Runs n independent trajectories on `workers` threads. Each trajectory's
// record lands in a slot addressed by its index and the reduction walks the
// slots in order, so results are bit-identical for any worker count.
TrajectorySet run_trajectories(const std::vector<std::string>& observables, const TrajectoryFn& fn,
                               const TrajectoryOptions& options);

// Mean and interval of one sample. Bootstrap draws use
// substream(seed, stream_index, bootstrap).
ObservableSummary summarize(const std::string& name, const std::vector<double>& samples, long long total,
                            const TrajectoryOptions& options, std::uint64_t stream_index = 0);

// Wilson score interval for k successes out of n at normal quantile z.
std::pair<double, double> wilson_interval(long long k, long long n, double z);
// Two-sided normal quantile for the given coverage (0.68 -> ~0.994).
double normal_quantile_two_sided(double coverage);

// Runs `fn(i)` for i in [0, n) on up to `workers` threads.
void parallel_for(long long n, int workers, const std::function<void(long long)>& fn);

// One JSON object per line.
std::string snapshot_to_json(const SnapshotRecord& rec, const std::vector<std::string>& observables);
void write_ndjson(std::ostream& os, const TrajectorySet& set);
// Header: observable,mean,ci_low,ci_high,acceptance_fraction
void write_summary_csv(std::ostream& os, const std::vector<ObservableSummary>& rows);
// Fixed-format number used by every CSV writer in the library.
std::string format_number(double x);

}  // namespace kfs
