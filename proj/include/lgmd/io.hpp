#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "lgmd/network.hpp"
#include "lgmd/objective.hpp"
#include "lgmd/optimize.hpp"

namespace lgmd {

// Full simulation/evaluation configuration, persisted as one JSON document.
struct NetworkConfig {
    Topology topology = Topology::standard();
    Variant variant = Variant::LGMD;
    NeuronConstants neuron;
    ParamVector params = ParamVector::reference(Variant::LGMD);
    double clamp_c = 0.05;  // STDP clamping fraction (P/AP)
    DetectorConfig detector;
    ScoreConfig score;
};

NetworkConfig load_network_config(const std::string& path);
NetworkConfig parse_network_config(const std::string& json_text);
std::string network_config_json(const NetworkConfig& config);

// FNV-1a over the canonical JSON dump; embedded in output artefacts so a
// rerun can detect configuration drift.
std::string config_hash(const NetworkConfig& config);

std::string report_json(const FitnessReport& report, uint64_t seed, const std::string& cfg_hash);
std::string report_csv_header();
std::string report_csv_row(const FitnessReport& report);

// Campaign log: eval_index,method,seed,fitness,best_so_far,params...
void write_campaign_csv(std::ostream& out, const CampaignResult& result, Method method,
                        uint64_t seed, const std::vector<std::string>& names,
                        const std::string& cfg_hash);

// Format a double with round-trip precision (used by all CSV writers so
// reruns are byte-identical).
std::string format_double(double v);

}  // namespace lgmd
