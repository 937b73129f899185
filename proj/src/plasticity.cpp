#include "lgmd/plasticity.hpp"

#include <algorithm>
#include <cmath>

namespace lgmd {

namespace {
inline void clamp_weight(SynapseState& s, const StdpParams& p) {
    s.w = std::clamp(s.w, 1.0 - p.clamp_c, 1.0 + p.clamp_c);
}
}  // namespace

void decay_traces(SynapseState& s, const StdpParams& p, double now_ms) {
    const double dt = now_ms - s.last_update_ms;
    if (dt > 0.0) {
        s.a_pre *= std::exp(-dt / p.tau_pre);
        s.a_post *= std::exp(-dt / p.tau_post);
    }
    s.last_update_ms = now_ms;
}

double on_pre_spike(SynapseState& s, const StdpParams& p, double q_pA) {
    const double injected = s.w * q_pA;
    s.a_pre += p.delta_pre;
    s.w += s.a_pre;
    s.w -= s.a_post;
    clamp_weight(s, p);
    return injected;
}

void on_post_spike(SynapseState& s, const StdpParams& p) {
    s.a_post += p.delta_post;
    s.w -= s.a_post;
    s.w += s.a_pre;
    clamp_weight(s, p);
}

}  // namespace lgmd
