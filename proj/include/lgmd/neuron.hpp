#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace lgmd {

// Fixed constants of the adaptive-exponential neuron. The defaults are the
// values the model was calibrated with; they are shared by every layer.
// Units: C pF, g_L nS, voltages mV. nS*mV/pF = mV/ms, so dt is in ms.
struct NeuronConstants {
    double C = 124.2;        // membrane capacitance, pF
    double g_L = 60.05;      // leak conductance, nS
    double E_L = -73.12;     // leak reversal, mV
    double V_T = -3.98;      // spike threshold, mV
    double Delta_T = 6.71;   // slope factor, mV
    double V_r = -73.12;     // reset potential, mV (defaults to E_L)
};

// Spike-frequency adaptation block. Disabled means I_adapt is held at zero.
struct AdaptationParams {
    double a = 0.0;      // sub-threshold adaptation, nS
    double b = 0.0;      // spike-triggered increment, pA
    double tau_w = 1.0;  // decay time constant, ms
    bool enabled = false;
};

struct SynapticTaus {
    double tau_e = 5.0;   // ms
    double tau_iA = 5.0;  // ms, fast inhibition
    double tau_iB = 5.0;  // ms, slow inhibition
};

enum class CurrentKind : uint8_t { E, IA, IB };

// Homogeneous layer state. All arrays share the neuron count.
struct LayerState {
    std::vector<double> V;        // mV
    std::vector<double> I_e;      // pA
    std::vector<double> I_iA;     // pA
    std::vector<double> I_iB;     // pA
    std::vector<double> I_adapt;  // pA

    LayerState() = default;
    LayerState(size_t n, const NeuronConstants& consts)
        : V(n, consts.E_L), I_e(n, 0.0), I_iA(n, 0.0), I_iB(n, 0.0), I_adapt(n, 0.0) {}

    size_t size() const { return V.size(); }
};

// Add amount (pA, non-negative) to one neuron's current accumulator.
void inject(LayerState& state, size_t index, CurrentKind kind, double amount);

// One forward-Euler step of the whole layer:
//   dV/dt = (-g_L (V - E_L) + g_L Delta_T exp((V - V_T)/Delta_T) + I) / C
//   I     = I_e - I_iA - I_iB - I_adapt
//   dI_x/dt      = -I_x / tau_x
//   dI_adapt/dt  = (a (V - E_L) - I_adapt) / tau_w        (when enabled)
// The exponential argument is clipped to <= 20; arguments below -10 skip the
// term entirely (contribution < 2e-5 mV per step for the default constants).
// Neurons crossing V_T are appended to spikes_out, reset to V_r, and receive
// I_adapt += b. Throws NumericalBlowup naming the first non-finite neuron.
void step_layer(LayerState& state, const NeuronConstants& consts, const SynapticTaus& taus,
                const AdaptationParams& adapt, double dt, std::vector<uint32_t>& spikes_out);

}  // namespace lgmd
