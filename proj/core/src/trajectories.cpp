#include "kfs/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "kfs/errors.hpp"

namespace kfs {

void parallel_for(long long n, int workers, const std::function<void(long long)>& fn) {
    if (n <= 0) return;
    const long long nw = std::clamp<long long>(workers, 1, n);
    if (nw == 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const long long i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (long long w = 0; w < nw; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double normal_quantile_two_sided(double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0)) throw SchemaError("confidence must lie in (0, 1)");
    // Solve erf(z / sqrt 2) = coverage by bisection; erf is monotone.
    double lo = 0.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::erf(mid / std::sqrt(2.0)) < coverage) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> wilson_interval(long long k, long long n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double nn = double(n);
    const double p = double(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ObservableSummary summarize(const std::string& name, const std::vector<double>& samples, long long total,
                            const TrajectoryOptions& options, std::uint64_t stream_index) {
    ObservableSummary out;
    out.name = name;
    out.total = total;
    out.accepted = static_cast<long long>(samples.size());
    if (samples.empty()) {
        out.mean = out.ci_low = out.ci_high = std::nan("");
        return out;
    }
    const double n = double(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    out.mean = sum / n;

    if (options.interval == IntervalMethod::Bootstrap && samples.size() > 1) {
        Rng rng = substream(options.seed, stream_index, stream_purpose::bootstrap);
        const int b = std::max(options.bootstrap_resamples, 2);
        std::vector<double> means(static_cast<std::size_t>(b));
        const int m = static_cast<int>(samples.size());
        for (int r = 0; r < b; ++r) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += samples[static_cast<std::size_t>(rng.below(m))];
            means[static_cast<std::size_t>(r)] = s / n;
        }
        std::sort(means.begin(), means.end());
        const double tail = 0.5 * (1.0 - options.confidence);
        auto at = [&](double q) {
            const double pos = q * double(b - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = std::min(lo + 1, means.size() - 1);
            return means[lo] + (pos - double(lo)) * (means[hi] - means[lo]);
        };
        out.ci_low = at(tail);
        out.ci_high = at(1.0 - tail);
        return out;
    }

    double ss = 0.0;
    for (double v : samples) ss += (v - out.mean) * (v - out.mean);
    const double sem = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    const double z = normal_quantile_two_sided(options.confidence);
    out.ci_low = out.mean - z * sem;
    out.ci_high = out.mean + z * sem;
    return out;
}

TrajectorySet run_trajectories(const std::vector<std::string>& observables, const TrajectoryFn& fn,
                               const TrajectoryOptions& options) {
    if (options.n < 1) throw SchemaError("trajectory count must be at least 1");
    const std::size_t nobs = observables.size();
    const auto n = static_cast<std::size_t>(options.n);

    // Values are stored densely so the reduction does not need every record.
    std::vector<double> values(n * nobs, 0.0);
    std::vector<char> accepted(n * nobs, 0);
    std::vector<SnapshotRecord> records(options.keep_snapshots ? n : 0);

    parallel_for(options.n, options.workers, [&](long long i) {
        Rng rng = substream(options.seed, static_cast<std::uint64_t>(i), stream_purpose::trajectory);
        SnapshotRecord rec = fn(i, rng);
        rec.trajectory = i;
        rec.seed = options.seed;
        if (rec.values.size() != nobs) throw InvariantBreach("trajectory reported the wrong number of observables");
        if (rec.accepted.empty()) rec.accepted.assign(nobs, 1);
        const auto base = static_cast<std::size_t>(i) * nobs;
        for (std::size_t k = 0; k < nobs; ++k) {
            values[base + k] = rec.values[k];
            accepted[base + k] = rec.accepted[k];
        }
        if (options.keep_snapshots) records[static_cast<std::size_t>(i)] = std::move(rec);
    });

    TrajectorySet out;
    out.observables = observables;
    out.snapshots = std::move(records);
    out.summary.reserve(nobs);
    std::vector<double> column;
    for (std::size_t k = 0; k < nobs; ++k) {
        column.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (accepted[i * nobs + k]) column.push_back(values[i * nobs + k]);
        out.summary.push_back(summarize(observables[k], column, options.n, options, k));
    }
    return out;
}

std::string snapshot_to_json(const SnapshotRecord& rec, const std::vector<std::string>& observables) {
    nlohmann::ordered_json j;
    j["trajectory"] = rec.trajectory;
    j["seed"] = rec.seed;
    j["ancilla_outcomes"] = rec.ancilla_outcomes;
    j["column_parities"] = rec.column_parities;
    j["lost_sites"] = rec.lost_sites;
    j["frame"] = rec.frame;
    nlohmann::ordered_json obs = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < observables.size() && k < rec.values.size(); ++k) {
        const bool ok = k >= rec.accepted.size() || rec.accepted[k];
        if (ok && std::isfinite(rec.values[k])) obs[observables[k]] = rec.values[k];
        else obs[observables[k]] = nullptr;
    }
    j["observables"] = std::move(obs);
    if (!rec.metadata.empty()) j["metadata"] = rec.metadata;
    return j.dump();
}

void write_ndjson(std::ostream& os, const TrajectorySet& set) {
    for (const auto& rec : set.snapshots) os << snapshot_to_json(rec, set.observables) << '\n';
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void write_summary_csv(std::ostream& os, const std::vector<ObservableSummary>& rows) {
    os << "observable,mean,ci_low,ci_high,acceptance_fraction\n";
    for (const auto& r : rows) {
        os << r.name << ',' << format_number(r.mean) << ',' << format_number(r.ci_low) << ','
           << format_number(r.ci_high) << ',' << format_number(r.acceptance_fraction()) << '\n';
    }
}

}  // namespace kfs
