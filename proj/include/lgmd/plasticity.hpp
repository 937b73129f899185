#pragma once

namespace lgmd {

// Pair-based STDP with exponentially decaying traces and proportional weight
// clamping. Weights start at w0 = 1 and are confined to [1-c, 1+c].
struct StdpParams {
    double tau_pre = 1.0;     // ms
    double tau_post = 1.0;    // ms
    double delta_pre = 0.0;   // trace increment at a pre-synaptic spike
    double delta_post = 0.0;  // trace increment at a post-synaptic spike
    double clamp_c = 0.0;     // weight excursion fraction, [0,1]
};

struct SynapseState {
    double w = 1.0;
    double a_pre = 0.0;
    double a_post = 0.0;
    double last_update_ms = 0.0;
};

// Event-driven exact exponential decay of both traces up to `now`.
void decay_traces(SynapseState& s, const StdpParams& p, double now_ms);

// Pre-synaptic spike: returns the injected current w*q, then applies the
// weight update (potentiation by the accumulated pre trace, depression by the
// post trace so that causal pairings win) and clamps. Traces must already be
// decayed to the spike time.
double on_pre_spike(SynapseState& s, const StdpParams& p, double q_pA);

// Post-synaptic spike: depression by the post trace, potentiation by the pre
// trace, clamp. Traces must already be decayed to the spike time.
void on_post_spike(SynapseState& s, const StdpParams& p);

}  // namespace lgmd
