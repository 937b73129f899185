#pragma once

#include <span>
#include <vector>

#include "lgmd/events.hpp"
#include "lgmd/network.hpp"

namespace lgmd {

// Loom detection rule: the output spike rate over a sliding window must
// exceed the threshold, and do so before the last lead_fraction of the
// looming interval.
struct DetectorConfig {
    double window_ms = 10.0;
    int threshold = 13;          // SL; comparison is strict >
    double lead_fraction = 0.10;
};

struct ScoreConfig {
    double k = 1.0;        // reward gain
    double l = 1.0;        // punishment peak
    double score_c = 0.5;  // punishment floor (distinct from the STDP clamp)
    double v_spk = -3.98;  // normalised spike value, mV
    double v_rest = -73.12;  // resting value, mV
};

struct Confusion {
    int tp = 0;
    int fp = 0;
    int tn = 0;
    int fn = 0;
    int total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

struct Metrics {
    double acc = 0.0;
    double sen = 0.0;
    double pre = 0.0;
    double spe = 0.0;
    // 0/0 ratios are reported as 0 with the matching flag set.
    bool sen_undefined = false;
    bool pre_undefined = false;
    bool spe_undefined = false;
};

struct FitnessReport {
    double f_acc = 0.0;
    double f = 0.0;
    double score = 0.0;
    double sseos = 0.0;
    Confusion confusion;
    Metrics metrics;
};

// Number of spikes in [t, t + window).
int spike_rate(std::span<const double> spike_times_ms, double t_ms, double window_ms);

// Slide the detection window at every dt step through each labelled interval
// (windows clipped at interval ends). A loom is a TP when detected before
// end - lead_fraction*length, else FN; a non-loom with any detection is FP.
Confusion classify_segments(std::span<const double> spike_times_ms, const LabelTrack& labels,
                            const DetectorConfig& det, double dt_ms = 0.1);

Metrics compute_metrics(const Confusion& confusion);

// Reward k*exp(t/seg_dur) + 1 while looming and spiking; t is measured from
// the segment start.
double reward(double t, double seg_duration, double k, bool spiking, bool looming);

// Punishment while spiking in a non-loom segment: ramps from score_c and
// falls back to it after the midpoint.
double punishment(double t, double seg_duration, double l, double score_c, bool spiking,
                  bool looming);

// Sum of reward minus punishment over every dt sample.
double score(std::span<const double> spike_times_ms, const LabelTrack& labels,
             const ScoreConfig& cfg, double dt_ms, double duration_ms);

// Negated sum of squared errors between the spike-normalised trace and the
// ideal trace (v_spk while looming, v_rest otherwise). Always <= 0.
double sseos(std::span<const double> v_trace, std::span<const double> spike_times_ms,
             const LabelTrack& labels, const ScoreConfig& cfg, double dt_ms);

double fitness(double score_value, double sseos_value);

// Accuracy-modulated fitness:
//   2F     if Acc == 1 and F > 0
//   0      if Acc == 1 and F < 0
//   Acc*F  if F < 0
//   F      otherwise
double fitness_acc(double f, double acc);

// The earlier scalar objective, kept for regression comparisons.
double f_init(double acc, std::span<const double> v_trace);

FitnessReport evaluate(const SimResult& sim, const LabelTrack& labels, const DetectorConfig& det,
                       const ScoreConfig& cfg);

// Mean sliding-window spike rate over all dt samples of each label class.
struct SrByLabel {
    double looming = 0.0;
    double non_looming = 0.0;
    double peak_looming = 0.0;
    double peak_non_looming = 0.0;
};
SrByLabel mean_sr_by_label(std::span<const double> spike_times_ms, const LabelTrack& labels,
                           double window_ms, double dt_ms = 0.1);

struct MwuResult {
    double u = 0.0;            // U statistic of the first sample
    double p_two_sided = 1.0;
};

// Rank-sum U with midrank ties. Exact permutation p when both samples have
// at most 8 values, normal approximation with tie correction otherwise.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

}  // namespace lgmd
