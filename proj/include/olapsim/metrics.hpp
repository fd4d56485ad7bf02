#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "olapsim/event_queue.hpp"
#include "olapsim/random.hpp"

namespace olapsim {

/// Fixed-width buckets; bucket index = floor(time / width).
class TimeSeries {
public:
    explicit TimeSeries(Seconds width = 1.0, std::size_t first_bucket = 0) : width_(width), first_(first_bucket) {}

    void add(Seconds time, double value) { add_to_bucket(bucket_of(time), value); }
    void add_to_bucket(std::size_t bucket, double value);

    [[nodiscard]] std::size_t bucket_of(Seconds time) const noexcept {
        return static_cast<std::size_t>(time / width_);
    }
    /// 0 for buckets never written or outside the stored range.
    [[nodiscard]] double at(std::size_t bucket) const noexcept;
    /// Sum over buckets [from, to).
    [[nodiscard]] double sum(std::size_t from, std::size_t to) const noexcept;

    [[nodiscard]] Seconds width() const noexcept { return width_; }
    [[nodiscard]] std::size_t first_bucket() const noexcept { return first_; }
    /// One past the last stored bucket.
    [[nodiscard]] std::size_t end_bucket() const noexcept { return first_ + values_.size(); }

private:
    Seconds width_;
    std::size_t first_;
    std::vector<double> values_;
};

/// Drops every bucket that starts before `warmup_end`.
[[nodiscard]] TimeSeries warmup_trim(const TimeSeries& series, Seconds warmup_end);

/// Fixed-capacity uniform sample (Algorithm R) with its own seeded stream.
class Reservoir {
public:
    Reservoir(std::size_t capacity, std::uint64_t seed, std::string_view name);

    void add(double value);
    [[nodiscard]] std::uint64_t seen() const noexcept { return seen_; }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] const std::vector<double>& samples() const noexcept { return samples_; }
    /// Nearest-rank percentile, p in (0, 1]. Throws MetricUndefined when empty.
    [[nodiscard]] double percentile(double p) const;

private:
    std::size_t capacity_;
    std::uint64_t seen_ = 0;
    std::vector<double> samples_;
    RandomStream stream_;
};

/// Nearest-rank percentile of an arbitrary sample (sorts a copy).
[[nodiscard]] double exact_percentile(std::vector<double> values, double p);

struct ServerSeries {
    ServerSeries(Seconds width, std::size_t reservoir_capacity, std::uint64_t seed, std::size_t server);

    TimeSeries arrivals;
    TimeSeries processing_sum;    // by completion time
    TimeSeries processing_count;
    TimeSeries wait_sum;
    TimeSeries busy;              // seconds of service within each bucket
    TimeSeries queue_length;      // sampled at metric ticks
    Reservoir processing;         // completions at or after the sampling start
    Seconds max_wait = 0.0;
    std::uint64_t positive_waits = 0;
};

/// Per-server series plus one cluster-wide processing reservoir.
class SeriesSet {
public:
    SeriesSet(std::size_t servers, Seconds width, Seconds sample_from, std::size_t reservoir_capacity,
              std::uint64_t seed);

    [[nodiscard]] std::size_t size() const noexcept { return servers_.size(); }
    [[nodiscard]] Seconds width() const noexcept { return width_; }
    [[nodiscard]] Seconds sample_from() const noexcept { return sample_from_; }
    [[nodiscard]] const ServerSeries& server(std::size_t i) const { return servers_.at(i); }
    [[nodiscard]] ServerSeries& server(std::size_t i) { return servers_.at(i); }
    [[nodiscard]] const Reservoir& cluster_processing() const noexcept { return cluster_; }
    [[nodiscard]] Reservoir& cluster_processing() noexcept { return cluster_; }
    /// One past the last bucket written by any statistic.
    [[nodiscard]] std::size_t end_bucket() const noexcept;

private:
    Seconds width_;
    Seconds sample_from_;
    std::vector<ServerSeries> servers_;
    Reservoir cluster_;
};

void record_arrival(SeriesSet& set, std::size_t server, Seconds time);
/// Buckets `duration` (wait + service) and `wait` at the completion time.
void record_processing(SeriesSet& set, std::size_t server, Seconds completed_at, Seconds duration, Seconds wait);
/// Spreads the busy interval [start, end) over the buckets it overlaps.
void record_busy(SeriesSet& set, std::size_t server, Seconds start, Seconds end);
void record_queue_length(SeriesSet& set, std::size_t server, Seconds time, double length);

struct ServerSummary {
    std::size_t server = 0;
    double arrivals = 0.0;
    double rate = 0.0;              // arrivals per second in the window
    double completions = 0.0;
    double mean_processing = 0.0;   // 0 when nothing completed
    double mean_wait = 0.0;
    double p95_processing = 0.0;
    double utilization = 0.0;
};

struct SummaryStats {
    Seconds window_start = 0.0;
    Seconds window_end = 0.0;
    std::vector<ServerSummary> servers;
    double mean_arrivals = 0.0;
    double stddev_arrivals = 0.0;
    double mean_processing = 0.0;
    double mean_wait = 0.0;
    double p95_processing = 0.0;
    double utilization_min = 0.0;
    double utilization_max = 0.0;

    [[nodiscard]] double utilization_spread() const noexcept { return utilization_max - utilization_min; }
    [[nodiscard]] double window_length() const noexcept { return window_end - window_start; }
};

/// Aggregates whole buckets inside [window_start, window_end).
[[nodiscard]] SummaryStats summarize(const SeriesSet& set, Seconds window_start, Seconds window_end);

/// Coefficient of variation (population stddev / mean) of per-server
/// arrival totals. Throws MetricUndefined for < 2 servers or a zero mean.
[[nodiscard]] double evenness(const SummaryStats& summary);
[[nodiscard]] double coefficient_of_variation(std::span<const double> values);

/// Mean queue wait of an M/D/1 station: rho * service / (2 (1 - rho)).
/// Throws Unstable when rho = lambda * service >= 1.
[[nodiscard]] Seconds mdl_wait_oracle(double lambda, Seconds service);

/// Busy time in [from, to) divided by the window length.
[[nodiscard]] double utilization(const TimeSeries& busy, Seconds from, Seconds to);

enum class ExportFormat : std::uint8_t { Csv, Svg };

/// Writes arrivals / processing / utilization files (.csv or .svg) into
/// `dir`, creating it if needed. CSV header: time_s,server_1,...,server_N,
/// one row per bucket. Returns the paths written; IO failures throw
/// std::runtime_error naming the path.
std::vector<std::filesystem::path> export_series(const SeriesSet& set, ExportFormat format,
                                                 const std::filesystem::path& dir);

}  // namespace olapsim
