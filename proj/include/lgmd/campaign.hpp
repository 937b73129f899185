#pragma once

#include <string>
#include <vector>

#include "lgmd/io.hpp"

namespace lgmd {

// Objective closing over a fixed stimulus: flat params -> F_acc. The stream
// is pooled to the network grid once, up front. Pure and thread-safe.
class NetworkObjective {
public:
    NetworkObjective(NetworkConfig config, const EventStream& stream, LabelTrack labels);

    double operator()(std::span<const double> flat) const;

    FitnessReport report_for(std::span<const double> flat) const;
    FitnessReport report_for(const ParamVector& params) const;

    const NetworkConfig& config() const { return config_; }
    const EventStream& stream() const { return stream_; }
    const LabelTrack& labels() const { return labels_; }

private:
    NetworkConfig config_;
    EventStream stream_;
    LabelTrack labels_;
};

// One optimisation run plus the metrics of its best parameter vector.
struct CampaignRun {
    uint64_t seed = 0;
    CampaignResult campaign;
    FitnessReport best_report;
};

CampaignRun run_network_campaign(const NetworkObjective& objective, const CampaignConfig& config);

// Per-method samples collected for the comparison protocol.
struct MethodSamples {
    Method method;
    std::vector<double> fit;  // best F_acc per run
    std::vector<double> eva;  // evaluations to convergence per run
    std::vector<double> acc, sen, pre, spe;

    double mean(const std::vector<double>& v) const;
};

struct PairwiseSignificance {
    Method first, second;
    std::string metric;
    double u = 0.0;
    double p = 1.0;
    bool significant = false;  // p <= 0.05
};

struct CompareResult {
    std::vector<MethodSamples> methods;
    std::vector<PairwiseSignificance> pairwise;
};

inline constexpr double kSignificanceLevel = 0.05;
inline constexpr const char* kCompareMetrics[] = {"Fit", "Eva", "Acc", "Sen", "Pre", "Spe"};

// Run n_runs seeded campaigns per method and test every ordered method pair
// on each metric.
CompareResult compare_methods(const NetworkObjective& objective, const CampaignConfig& base,
                              const std::vector<Method>& methods, size_t n_runs);

std::string compare_table_csv(const CompareResult& result);
std::string compare_runs_csv(const CompareResult& result);
std::string compare_significance_csv(const CompareResult& result);

struct ClampRow {
    double c = 0.0;
    Metrics metrics;
};

// Evaluate the configured (plastic) network at each clamping value.
// Duplicates are removed; values outside [0,1] raise ConfigError.
std::vector<ClampRow> clamp_sweep(const NetworkConfig& config, const EventStream& stream,
                                  const LabelTrack& labels, std::vector<double> c_values,
                                  bool* deduplicated = nullptr);

std::string clamp_sweep_csv(const std::vector<ClampRow>& rows);

}  // namespace lgmd
