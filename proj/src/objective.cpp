#include "lgmd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lgmd/errors.hpp"

namespace lgmd {

int spike_rate(std::span<const double> spike_times_ms, double t_ms, double window_ms) {
    const auto lo = std::lower_bound(spike_times_ms.begin(), spike_times_ms.end(), t_ms);
    const auto hi = std::lower_bound(lo, spike_times_ms.end(), t_ms + window_ms);
    return static_cast<int>(hi - lo);
}

namespace {

// Spike count in [t, t + window) restricted to spikes within [seg_lo, seg_hi),
// walked with two pointers as t advances by dt.
struct WindowCounter {
    std::span<const double> spikes;
    size_t lo = 0, hi = 0;
    int count(double t, double window, double seg_end) {
        const double w_end = std::min(t + window, seg_end);
        while (hi < spikes.size() && spikes[hi] < w_end) ++hi;
        while (lo < hi && spikes[lo] < t) ++lo;
        return static_cast<int>(hi - lo);
    }
};

std::span<const double> segment_spikes(std::span<const double> spikes, double lo_ms,
                                       double hi_ms) {
    const auto first = std::lower_bound(spikes.begin(), spikes.end(), lo_ms);
    const auto last = std::lower_bound(first, spikes.end(), hi_ms);
    return {first, last};
}

}  // namespace

Confusion classify_segments(std::span<const double> spike_times_ms, const LabelTrack& labels,
                            const DetectorConfig& det, double dt_ms) {
    Confusion confusion;
    for (const auto& iv : labels.intervals) {
        const double start = iv.start_us * 1e-3;
        const double end = iv.end_us * 1e-3;
        const double deadline = end - det.lead_fraction * (end - start);
        auto seg = segment_spikes(spike_times_ms, start, end);
        WindowCounter counter{seg};

        bool detected = false;
        bool detected_in_time = false;
        // No window can exceed the threshold without spikes; skip the scan.
        if (static_cast<int>(seg.size()) > det.threshold) {
            const auto n_samples = static_cast<long long>(std::floor((end - start) / dt_ms));
            for (long long i = 0; i <= n_samples; ++i) {
                const double t = start + static_cast<double>(i) * dt_ms;
                if (t >= end) break;
                if (counter.count(t, det.window_ms, end) > det.threshold) {
                    detected = true;
                    detected_in_time = t < deadline;
                    break;
                }
            }
        }

        if (iv.label == Label::Looming) {
            if (detected && detected_in_time) {
                ++confusion.tp;
            } else {
                ++confusion.fn;
            }
        } else {
            if (detected) {
                ++confusion.fp;
            } else {
                ++confusion.tn;
            }
        }
    }
    return confusion;
}

Metrics compute_metrics(const Confusion& c) {
    if (c.total() == 0) throw EmptyConfusion("all confusion counts are zero");
    Metrics m;
    m.acc = static_cast<double>(c.tp + c.tn) / c.total();
    if (c.tp + c.fn > 0) {
        m.sen = static_cast<double>(c.tp) / (c.tp + c.fn);
    } else {
        m.sen_undefined = true;
    }
    if (c.tp + c.fp > 0) {
        m.pre = static_cast<double>(c.tp) / (c.tp + c.fp);
    } else {
        m.pre_undefined = true;
    }
    if (c.tn + c.fp > 0) {
        m.spe = static_cast<double>(c.tn) / (c.tn + c.fp);
    } else {
        m.spe_undefined = true;
    }
    return m;
}

double reward(double t, double seg_duration, double k, bool spiking, bool looming) {
    if (!(looming && spiking)) return 0.0;
    return k * std::exp(t / seg_duration) + 1.0;
}

double punishment(double t, double seg_duration, double l, double score_c, bool spiking,
                  bool looming) {
    if (looming || !spiking) return 0.0;
    const double half = seg_duration / 2.0;
    if (t < half) return (l - score_c) * t / seg_duration + score_c;
    return (l - score_c) * (1.0 - (t - half) / half) + score_c;
}

namespace {

struct SegmentCursor {
    const LabelTrack& labels;
    size_t idx = 0;
    const LabelInterval& at(double t_ms) {
        const int64_t t_us = static_cast<int64_t>(t_ms * 1000.0);
        while (idx + 1 < labels.intervals.size() && t_us >= labels.intervals[idx].end_us) ++idx;
        return labels.intervals[idx];
    }
};

}  // namespace

double score(std::span<const double> spike_times_ms, const LabelTrack& labels,
             const ScoreConfig& cfg, double dt_ms, double duration_ms) {
    if (labels.intervals.empty()) return 0.0;
    const auto n_samples = static_cast<long long>(std::llround(duration_ms / dt_ms));
    SegmentCursor cursor{labels};
    size_t spike_idx = 0;
    double total = 0.0;
    for (long long i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i + 1) * dt_ms;
        bool spiking = false;
        while (spike_idx < spike_times_ms.size() && spike_times_ms[spike_idx] <= t) {
            spiking = true;
            ++spike_idx;
        }
        if (!spiking) continue;
        const auto& seg = cursor.at(t);
        const bool looming = seg.label == Label::Looming;
        const double seg_start = seg.start_us * 1e-3;
        const double seg_dur = (seg.end_us - seg.start_us) * 1e-3;
        const double local = t - seg_start;
        total += reward(local, seg_dur, cfg.k, true, looming);
        total -= punishment(local, seg_dur, cfg.l, cfg.score_c, true, looming);
    }
    return total;
}

double sseos(std::span<const double> v_trace, std::span<const double> spike_times_ms,
             const LabelTrack& labels, const ScoreConfig& cfg, double dt_ms) {
    SegmentCursor cursor{labels};
    size_t spike_idx = 0;
    double sum = 0.0;
    for (size_t i = 0; i < v_trace.size(); ++i) {
        const double t = static_cast<double>(i + 1) * dt_ms;
        double actual = v_trace[i];
        while (spike_idx < spike_times_ms.size() && spike_times_ms[spike_idx] <= t) {
            if (spike_times_ms[spike_idx] > t - dt_ms) actual = cfg.v_spk;
            ++spike_idx;
        }
        const bool looming =
            !labels.intervals.empty() && cursor.at(t).label == Label::Looming;
        const double ideal = looming ? cfg.v_spk : cfg.v_rest;
        // Errors accumulate in volts so the regulariser sits on a scale
        // comparable to the spike-timing score.
        const double err = (actual - ideal) * 1e-3;
        sum += err * err;
    }
    return -sum;
}

double fitness(double score_value, double sseos_value) { return (score_value + sseos_value) / 2.0; }

double fitness_acc(double f, double acc) {
    if (acc == 1.0 && f > 0.0) return 2.0 * f;
    if (acc == 1.0 && f < 0.0) return 0.0;
    if (f < 0.0) return acc * f;
    return f;
}

double f_init(double acc, std::span<const double> v_trace) {
    double sq = 0.0;
    for (double v : v_trace) sq += v * v;
    return acc - std::sqrt(sq);
}

FitnessReport evaluate(const SimResult& sim, const LabelTrack& labels, const DetectorConfig& det,
                       const ScoreConfig& cfg) {
    FitnessReport report;
    report.confusion = classify_segments(sim.lgmd_spike_times_ms, labels, det, sim.dt_ms);
    report.metrics = compute_metrics(report.confusion);
    const double duration_ms = static_cast<double>(sim.lgmd_voltage_mv.size()) * sim.dt_ms;
    report.score = score(sim.lgmd_spike_times_ms, labels, cfg, sim.dt_ms, duration_ms);
    report.sseos = sseos(sim.lgmd_voltage_mv, sim.lgmd_spike_times_ms, labels, cfg, sim.dt_ms);
    report.f = fitness(report.score, report.sseos);
    report.f_acc = fitness_acc(report.f, report.metrics.acc);
    return report;
}

SrByLabel mean_sr_by_label(std::span<const double> spike_times_ms, const LabelTrack& labels,
                           double window_ms, double dt_ms) {
    SrByLabel out;
    double loom_sum = 0.0, non_sum = 0.0;
    long long loom_n = 0, non_n = 0;
    for (const auto& iv : labels.intervals) {
        const double start = iv.start_us * 1e-3;
        const double end = iv.end_us * 1e-3;
        auto seg = segment_spikes(spike_times_ms, start, end);
        WindowCounter counter{seg};
        const auto n_samples = static_cast<long long>(std::floor((end - start) / dt_ms));
        double peak = 0.0;
        for (long long i = 0; i <= n_samples; ++i) {
            const double t = start + static_cast<double>(i) * dt_ms;
            if (t >= end) break;
            const int sr = counter.count(t, window_ms, end);
            peak = std::max(peak, static_cast<double>(sr));
            if (iv.label == Label::Looming) {
                loom_sum += sr;
                ++loom_n;
            } else {
                non_sum += sr;
                ++non_n;
            }
        }
        if (iv.label == Label::Looming) {
            out.peak_looming = std::max(out.peak_looming, peak);
        } else {
            out.peak_non_looming = std::max(out.peak_non_looming, peak);
        }
    }
    if (loom_n > 0) out.looming = loom_sum / static_cast<double>(loom_n);
    if (non_n > 0) out.non_looming = non_sum / static_cast<double>(non_n);
    return out;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U
// ---------------------------------------------------------------------------

namespace {

// Midranks of the pooled sample; returns ranks aligned with the input order
// and accumulates the tie-correction term sum(t^3 - t).
std::vector<double> midranks(const std::vector<double>& pooled, double& tie_term) {
    const size_t n = pooled.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(n);
    tie_term = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    return ranks;
}

double u_from_ranks(const std::vector<double>& ranks, size_t n_first) {
    double r = 0.0;
    for (size_t i = 0; i < n_first; ++i) r += ranks[i];
    return r - static_cast<double>(n_first) * (n_first + 1) / 2.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact two-sided p by enumerating every assignment of the pooled values to
// the first sample, counting deviations from nm/2 at least as large as the
// observed one.
double exact_p(const std::vector<double>& ranks, size_t n, size_t m, double u_obs) {
    const size_t total = n + m;
    const double centre = static_cast<double>(n * m) / 2.0;
    const double dev_obs = std::abs(u_obs - centre) - 1e-12;
    long long extreme = 0, count = 0;
    std::vector<size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        double r = 0.0;
        for (size_t idx : pick) r += ranks[idx];
        const double u = r - static_cast<double>(n) * (n + 1) / 2.0;
        if (std::abs(u - centre) >= dev_obs) ++extreme;
        ++count;
        // next combination
        size_t i = n;
        while (i > 0) {
            --i;
            if (pick[i] != i + total - n) {
                ++pick[i];
                for (size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return static_cast<double>(extreme) / static_cast<double>(count);
        }
    }
}

}  // namespace

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw EmptySample("mann_whitney_u requires nonempty samples");
    const size_t n = a.size();
    const size_t m = b.size();
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    double tie_term = 0.0;
    const auto ranks = midranks(pooled, tie_term);
    const double u = u_from_ranks(ranks, n);

    MwuResult result;
    result.u = u;
    if (n <= 8 && m <= 8) {
        result.p_two_sided = exact_p(ranks, n, m, u);
        return result;
    }

    const double nm = static_cast<double>(n) * static_cast<double>(m);
    const double total = static_cast<double>(n + m);
    const double var =
        nm / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if (var <= 0.0) {  // all values tied
        result.p_two_sided = 1.0;
        return result;
    }
    const double dev = std::abs(u - nm / 2.0);
    const double z = (dev - 0.5) / std::sqrt(var);  // continuity correction
    result.p_two_sided = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::max(z, 0.0))));
    return result;
}

}  // namespace lgmd
