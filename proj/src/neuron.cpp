#include "lgmd/neuron.hpp"

#include <cmath>
#include <string>

#include "lgmd/errors.hpp"

namespace lgmd {

namespace {
// Below this argument the exponential term is dropped: exp(-10) * g_L *
// Delta_T * dt / C < 2e-5 mV per step for the default constants, so the
// resting state stays pinned at E_L instead of drifting by the same amount.
constexpr double kExpArgSkip = -10.0;
constexpr double kExpArgClip = 20.0;
}  // namespace

void inject(LayerState& state, size_t index, CurrentKind kind, double amount) {
    if (index >= state.size())
        throw IndexError("inject: neuron index " + std::to_string(index) + " out of range");
    switch (kind) {
        case CurrentKind::E: state.I_e[index] += amount; break;
        case CurrentKind::IA: state.I_iA[index] += amount; break;
        case CurrentKind::IB: state.I_iB[index] += amount; break;
    }
}

void step_layer(LayerState& state, const NeuronConstants& consts, const SynapticTaus& taus,
                const AdaptationParams& adapt, double dt, std::vector<uint32_t>& spikes_out) {
    spikes_out.clear();
    const size_t n = state.size();
    const double decay_e = 1.0 - dt / taus.tau_e;
    const double decay_iA = 1.0 - dt / taus.tau_iA;
    const double decay_iB = 1.0 - dt / taus.tau_iB;
    const double inv_C = dt / consts.C;
    const double gl_dt = consts.g_L * consts.Delta_T;

    double* V = state.V.data();
    double* Ie = state.I_e.data();
    double* IiA = state.I_iA.data();
    double* IiB = state.I_iB.data();
    double* Iw = state.I_adapt.data();

    for (size_t i = 0; i < n; ++i) {
        const double v = V[i];

        // Spike test on the entry state: externally raised potentials fire
        // before the leak can pull them back under threshold.
        if (v > consts.V_T) {
            if (!std::isfinite(v))
                throw NumericalBlowup(i, "non-finite membrane potential at neuron " +
                                             std::to_string(i));
            spikes_out.push_back(static_cast<uint32_t>(i));
            V[i] = consts.V_r;
            if (adapt.enabled) {
                Iw[i] += dt * (adapt.a * (v - consts.E_L) - Iw[i]) / adapt.tau_w;
                Iw[i] += adapt.b;
            }
            Ie[i] *= decay_e;
            IiA[i] *= decay_iA;
            IiB[i] *= decay_iB;
            continue;
        }

        double current = Ie[i] - IiA[i] - IiB[i];
        if (adapt.enabled) current -= Iw[i];

        double arg = (v - consts.V_T) / consts.Delta_T;
        double exp_term = 0.0;
        if (arg > kExpArgSkip) {
            if (arg > kExpArgClip) arg = kExpArgClip;
            exp_term = gl_dt * std::exp(arg);
        }
        const double v_new = v + (-consts.g_L * (v - consts.E_L) + exp_term + current) * inv_C;

        if (adapt.enabled) {
            Iw[i] += dt * (adapt.a * (v - consts.E_L) - Iw[i]) / adapt.tau_w;
        }
        Ie[i] *= decay_e;
        IiA[i] *= decay_iA;
        IiB[i] *= decay_iB;

        if (!std::isfinite(v_new))
            throw NumericalBlowup(i, "non-finite membrane potential at neuron " +
                                         std::to_string(i));

        if (v_new > consts.V_T) {
            spikes_out.push_back(static_cast<uint32_t>(i));
            V[i] = consts.V_r;
            if (adapt.enabled) Iw[i] += adapt.b;
        } else {
            V[i] = v_new;
        }
    }
}

}  // namespace lgmd
