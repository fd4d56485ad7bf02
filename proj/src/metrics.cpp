#include "olapsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "olapsim/errors.hpp"
#include "olapsim/text.hpp"

namespace olapsim {

void TimeSeries::add_to_bucket(std::size_t bucket, double value) {
    if (bucket < first_) return;
    const std::size_t i = bucket - first_;
    if (i >= values_.size()) values_.resize(i + 1, 0.0);
    values_[i] += value;
}

double TimeSeries::at(std::size_t bucket) const noexcept {
    if (bucket < first_ || bucket - first_ >= values_.size()) return 0.0;
    return values_[bucket - first_];
}

double TimeSeries::sum(std::size_t from, std::size_t to) const noexcept {
    double total = 0.0;
    for (std::size_t b = std::max(from, first_); b < std::min(to, end_bucket()); ++b) total += values_[b - first_];
    return total;
}

TimeSeries warmup_trim(const TimeSeries& series, Seconds warmup_end) {
    const auto first = static_cast<std::size_t>(std::ceil(warmup_end / series.width()));
    TimeSeries out(series.width(), std::max(first, series.first_bucket()));
    for (std::size_t b = out.first_bucket(); b < series.end_bucket(); ++b) out.add_to_bucket(b, series.at(b));
    return out;
}

Reservoir::Reservoir(std::size_t capacity, std::uint64_t seed, std::string_view name)
    : capacity_(capacity), stream_(seed, name) {
    samples_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void Reservoir::add(double value) {
    ++seen_;
    if (samples_.size() < capacity_) {
        samples_.push_back(value);
        return;
    }
    const std::uint64_t slot = stream_.below(seen_);
    if (slot < capacity_) samples_[slot] = value;
}

double Reservoir::percentile(double p) const {
    if (samples_.empty()) throw MetricUndefined("percentile of an empty sample");
    return exact_percentile(samples_, p);
}

double exact_percentile(std::vector<double> values, double p) {
    if (values.empty()) throw MetricUndefined("percentile of an empty sample");
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

ServerSeries::ServerSeries(Seconds width, std::size_t reservoir_capacity, std::uint64_t seed, std::size_t server)
    : arrivals(width),
      processing_sum(width),
      processing_count(width),
      wait_sum(width),
      busy(width),
      queue_length(width),
      processing(reservoir_capacity, seed, "metrics.reservoir." + std::to_string(server)) {}

SeriesSet::SeriesSet(std::size_t servers, Seconds width, Seconds sample_from, std::size_t reservoir_capacity,
                     std::uint64_t seed)
    : width_(width), sample_from_(sample_from), cluster_(reservoir_capacity, seed, "metrics.reservoir.cluster") {
    servers_.reserve(servers);
    for (std::size_t i = 0; i < servers; ++i) servers_.emplace_back(width, reservoir_capacity, seed, i);
}

std::size_t SeriesSet::end_bucket() const noexcept {
    std::size_t end = 0;
    for (const auto& s : servers_) {
        for (const TimeSeries* t : {&s.arrivals, &s.processing_sum, &s.busy}) end = std::max(end, t->end_bucket());
    }
    return end;
}

void record_arrival(SeriesSet& set, std::size_t server, Seconds time) { set.server(server).arrivals.add(time, 1.0); }

void record_processing(SeriesSet& set, std::size_t server, Seconds completed_at, Seconds duration, Seconds wait) {
    ServerSeries& s = set.server(server);
    s.processing_sum.add(completed_at, duration);
    s.processing_count.add(completed_at, 1.0);
    s.wait_sum.add(completed_at, wait);
    s.max_wait = std::max(s.max_wait, wait);
    if (wait > 0.0) ++s.positive_waits;
    if (completed_at >= set.sample_from()) {
        s.processing.add(duration);
        set.cluster_processing().add(duration);
    }
}

void record_busy(SeriesSet& set, std::size_t server, Seconds start, Seconds end) {
    TimeSeries& busy = set.server(server).busy;
    const Seconds w = busy.width();
    Seconds at = start;
    while (at < end) {
        const std::size_t b = busy.bucket_of(at);
        const Seconds bucket_end = static_cast<double>(b + 1) * w;
        const Seconds upto = std::min(end, bucket_end);
        busy.add_to_bucket(b, upto - at);
        // Guard against a bucket edge that rounds back onto `at`.
        at = upto > at ? upto : std::nextafter(at, end);
    }
}

void record_queue_length(SeriesSet& set, std::size_t server, Seconds time, double length) {
    set.server(server).queue_length.add(time, length);
}

double utilization(const TimeSeries& busy, Seconds from, Seconds to) {
    if (!(to > from)) throw std::invalid_argument("utilization window must be positive");
    const auto first = static_cast<std::size_t>(std::ceil(from / busy.width()));
    const auto last = static_cast<std::size_t>(std::floor(to / busy.width()));
    if (last <= first) return 0.0;
    const double span = static_cast<double>(last - first) * busy.width();
    return std::clamp(busy.sum(first, last) / span, 0.0, 1.0);
}

SummaryStats summarize(const SeriesSet& set, Seconds window_start, Seconds window_end) {
    SummaryStats out;
    const Seconds w = set.width();
    const auto first = static_cast<std::size_t>(std::ceil(window_start / w));
    const auto last = std::max(first, static_cast<std::size_t>(std::floor(window_end / w)));
    out.window_start = static_cast<double>(first) * w;
    out.window_end = static_cast<double>(last) * w;
    const double span = out.window_length();

    double total_processing = 0.0;
    double total_wait = 0.0;
    double total_completions = 0.0;
    std::vector<double> totals;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const ServerSeries& s = set.server(i);
        ServerSummary ss;
        ss.server = i;
        ss.arrivals = s.arrivals.sum(first, last);
        ss.completions = s.processing_count.sum(first, last);
        const double proc = s.processing_sum.sum(first, last);
        const double wait = s.wait_sum.sum(first, last);
        if (span > 0.0) {
            ss.rate = ss.arrivals / span;
            ss.utilization = std::clamp(s.busy.sum(first, last) / span, 0.0, 1.0);
        }
        if (ss.completions > 0.0) {
            ss.mean_processing = proc / ss.completions;
            ss.mean_wait = wait / ss.completions;
        }
        if (!s.processing.samples().empty()) ss.p95_processing = s.processing.percentile(0.95);
        total_processing += proc;
        total_wait += wait;
        total_completions += ss.completions;
        totals.push_back(ss.arrivals);
        out.servers.push_back(ss);
    }

    if (!totals.empty()) {
        double sum = 0.0;
        for (double t : totals) sum += t;
        out.mean_arrivals = sum / static_cast<double>(totals.size());
        double sq = 0.0;
        for (double t : totals) sq += (t - out.mean_arrivals) * (t - out.mean_arrivals);
        out.stddev_arrivals = std::sqrt(sq / static_cast<double>(totals.size()));
        auto [lo, hi] = std::minmax_element(out.servers.begin(), out.servers.end(),
                                            [](const auto& a, const auto& b) { return a.utilization < b.utilization; });
        out.utilization_min = lo->utilization;
        out.utilization_max = hi->utilization;
    }
    if (total_completions > 0.0) {
        out.mean_processing = total_processing / total_completions;
        out.mean_wait = total_wait / total_completions;
    }
    if (!set.cluster_processing().samples().empty()) out.p95_processing = set.cluster_processing().percentile(0.95);
    return out;
}

double coefficient_of_variation(std::span<const double> values) {
    if (values.size() < 2) throw MetricUndefined("evenness needs at least two servers");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double m = sum / static_cast<double>(values.size());
    if (!(m > 0.0)) throw MetricUndefined("evenness undefined for a zero mean");
    double sq = 0.0;
    for (double v : values) sq += (v - m) * (v - m);
    return std::sqrt(sq / static_cast<double>(values.size())) / m;
}

double evenness(const SummaryStats& summary) {
    std::vector<double> totals;
    for (const auto& s : summary.servers) totals.push_back(s.arrivals);
    return coefficient_of_variation(totals);
}

Seconds mdl_wait_oracle(double lambda, Seconds service) {
    const double rho = lambda * service;
    if (rho >= 1.0) throw Unstable("M/D/1 unstable at rho = " + format_number(rho));
    return rho * service / (2.0 * (1.0 - rho));
}

namespace {

struct Statistic {
    const char* name;
    // Value of bucket b for a server.
    double (*value)(const ServerSeries&, std::size_t b, Seconds width);
};

constexpr Statistic kStatistics[] = {
    {"arrivals", [](const ServerSeries& s, std::size_t b, Seconds w) { return s.arrivals.at(b) / w; }},
    {"processing",
     [](const ServerSeries& s, std::size_t b, Seconds) {
         const double n = s.processing_count.at(b);
         return n > 0.0 ? s.processing_sum.at(b) / n : 0.0;
     }},
    {"utilization", [](const ServerSeries& s, std::size_t b, Seconds w) { return s.busy.at(b) / w; }},
};

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << body;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string csv_for(const SeriesSet& set, const Statistic& stat, std::size_t end) {
    std::string text = "time_s";
    for (std::size_t i = 0; i < set.size(); ++i) text += ",server_" + std::to_string(i + 1);
    text += '\n';
    for (std::size_t b = 0; b < end; ++b) {
        text += format_number(static_cast<double>(b) * set.width());
        for (std::size_t i = 0; i < set.size(); ++i) {
            text += ',';
            text += format_number(stat.value(set.server(i), b, set.width()));
        }
        text += '\n';
    }
    return text;
}

// One panel per server stacked top to bottom, shared time axis.
std::string svg_for(const SeriesSet& set, const Statistic& stat, std::size_t end) {
    constexpr double kWidth = 900.0, kPanel = 90.0, kLeft = 80.0, kRight = 20.0, kGap = 10.0;
    const std::size_t n = set.size();
    const double height = static_cast<double>(n) * (kPanel + kGap) + 40.0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t b = 0; b < end; ++b) vmax = std::max(vmax, stat.value(set.server(i), b, set.width()));
    }
    if (vmax <= 0.0) vmax = 1.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double x_scale = end > 1 ? plot_w / static_cast<double>(end - 1) : 0.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height << "\">\n";
    svg << "<text x=\"" << kLeft << "\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">" << stat.name
        << " per server (max " << format_number(vmax) << ")</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double top = 30.0 + static_cast<double>(i) * (kPanel + kGap);
        svg << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << kPanel
            << "\" fill=\"none\" stroke=\"#999\"/>\n";
        svg << "<text x=\"4\" y=\"" << top + kPanel / 2 << "\" font-family=\"sans-serif\" font-size=\"11\">server_"
            << i + 1 << "</text>\n";
        svg << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1\" points=\"";
        for (std::size_t b = 0; b < end; ++b) {
            const double v = stat.value(set.server(i), b, set.width());
            svg << format_number(kLeft + static_cast<double>(b) * x_scale) << ','
                << format_number(top + kPanel - kPanel * v / vmax) << ' ';
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

std::vector<std::filesystem::path> export_series(const SeriesSet& set, ExportFormat format,
                                                 const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    const std::size_t end = set.end_bucket();
    std::vector<std::filesystem::path> written;
    for (const Statistic& stat : kStatistics) {
        const auto path = dir / (std::string(stat.name) + (format == ExportFormat::Csv ? ".csv" : ".svg"));
        write_file(path, format == ExportFormat::Csv ? csv_for(set, stat, end) : svg_for(set, stat, end));
        written.push_back(path);
    }
    return written;
}

}  // namespace olapsim
