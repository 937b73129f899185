#pragma once

#include <cstdint>
#include <vector>

#include "lgmd/events.hpp"
#include "lgmd/neuron.hpp"
#include "lgmd/params.hpp"
#include "lgmd/plasticity.hpp"

namespace lgmd {

// One inhibitory kernel tap: offset from the spiking P neuron and its
// distance weight.
struct KernelTap {
    int dx = 0;
    int dy = 0;
    double weight = 1.0;

    bool operator==(const KernelTap&) const = default;
};

// Offsets at exactly Chebyshev distance `radius` from the centre, weighted
// by 1/Euclidean-distance.
std::vector<KernelTap> inhibition_ring(int radius);

struct Topology {
    int32_t width = 32;   // P and S dims
    int32_t height = 32;
    int32_t pooling = 4;  // P -> IP and S -> IS block size
    std::vector<KernelTap> ring_a;  // fast inhibition, defaults to radius 1
    std::vector<KernelTap> ring_b;  // slow inhibition, defaults to radius 2

    static Topology standard(int32_t width = 32, int32_t height = 32, int32_t pooling = 4);

    int32_t pooled_width() const { return width / pooling; }
    int32_t pooled_height() const { return height / pooling; }
};

struct RecordFlags {
    bool voltage = true;
    bool rasters = false;
};

// Spike time and neuron index within a layer.
struct RasterSpike {
    double t_ms;
    uint32_t neuron;

    bool operator==(const RasterSpike&) const = default;
};

struct SimResult {
    std::vector<double> lgmd_spike_times_ms;  // strictly increasing
    std::vector<double> lgmd_voltage_mv;      // one sample per dt step
    double dt_ms = 0.1;
    // Optional per-layer rasters in layer order P, S, IP, IS, LGMD.
    std::vector<std::vector<RasterSpike>> rasters;

    bool operator==(const SimResult&) const = default;
};

enum class SynapseGroup : uint8_t { PS_Centre, PS_RingA, PS_RingB, P_IP, S_IS, IS_L, IP_L };

// The five-layer looming detector: photoreceptor (P), summing (S), pooled
// intermediate layers (IP, IS) and the single output neuron. Synapses are
// applied as kernels on the fly; only the plastic groups (S->IS, IS->LGMD)
// carry per-synapse state.
class Network {
public:
    Network(const ParamVector& params, const Topology& topo, Variant variant,
            const NeuronConstants& consts = {}, double clamp_c = 0.0);

    // Advance through the stream at dt = 0.1 ms. Events arriving in
    // (t, t+dt] inject q_eP into their P neuron; spikes propagate one step
    // later. The stream is pooled to the P dims first when they divide.
    SimResult simulate(const EventStream& stream, const RecordFlags& record = {});

    // Static synapse count per group, borders truncated.
    size_t synapse_count(SynapseGroup group) const;

    const Topology& topology() const { return topo_; }
    Variant variant() const { return variant_; }
    const std::vector<SynapseState>& s_is_synapses() const { return s_is_syn_; }
    const std::vector<SynapseState>& is_l_synapses() const { return is_l_syn_; }

    static constexpr double kDtMs = 0.1;

private:
    void reset();

    ParamVector params_;
    Topology topo_;
    Variant variant_;
    NeuronConstants consts_;
    double clamp_c_;
    StdpParams stdp_;
    bool plastic_;
    AdaptationParams lgmd_adapt_;

    LayerState p_, s_, ip_, is_, lgmd_;
    std::vector<SynapseState> s_is_syn_;  // one per S neuron
    std::vector<SynapseState> is_l_syn_;  // one per IS neuron
};

}  // namespace lgmd
