#include "lgmd/network.hpp"

#include <cmath>
#include <string>

#include "lgmd/errors.hpp"

namespace lgmd {

std::vector<KernelTap> inhibition_ring(int radius) {
    std::vector<KernelTap> taps;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (std::max(std::abs(dx), std::abs(dy)) != radius) continue;
            taps.push_back({dx, dy, 1.0 / std::sqrt(double(dx) * dx + double(dy) * dy)});
        }
    }
    return taps;
}

Topology Topology::standard(int32_t width, int32_t height, int32_t pooling) {
    if (width <= 0 || height <= 0 || pooling <= 0 || width % pooling != 0 ||
        height % pooling != 0) {
        throw ConfigError("pooling factor must divide the P dims");
    }
    Topology topo;
    topo.width = width;
    topo.height = height;
    topo.pooling = pooling;
    topo.ring_a = inhibition_ring(1);
    topo.ring_b = inhibition_ring(2);
    return topo;
}

Network::Network(const ParamVector& params, const Topology& topo, Variant variant,
                 const NeuronConstants& consts, double clamp_c)
    : params_(params), topo_(topo), variant_(variant), consts_(consts), clamp_c_(clamp_c) {
    if (variant_adapts(variant) && !params.adaptation)
        throw ConfigError("variant " + variant_name(variant) + " requires an adaptation block");
    if (variant_plastic(variant) && !params.plasticity)
        throw ConfigError("variant " + variant_name(variant) + " requires a plasticity block");
    if (topo.width <= 0 || topo.height <= 0 || topo.pooling <= 0 ||
        topo.width % topo.pooling != 0 || topo.height % topo.pooling != 0)
        throw ConfigError("pooling factor must divide the P dims");

    plastic_ = variant_plastic(variant);
    if (plastic_) {
        stdp_ = StdpParams{params.plasticity->tau_pre, params.plasticity->tau_post,
                           params.plasticity->delta_pre, params.plasticity->delta_post, clamp_c_};
    }
    lgmd_adapt_ = AdaptationParams{};
    if (variant_adapts(variant)) {
        lgmd_adapt_ = AdaptationParams{params.adaptation->a, params.adaptation->b,
                                       params.adaptation->tau_w, true};
    }
    reset();
}

void Network::reset() {
    const size_t n_p = static_cast<size_t>(topo_.width) * topo_.height;
    const size_t n_pool = static_cast<size_t>(topo_.pooled_width()) * topo_.pooled_height();
    p_ = LayerState(n_p, consts_);
    s_ = LayerState(n_p, consts_);
    ip_ = LayerState(n_pool, consts_);
    is_ = LayerState(n_pool, consts_);
    lgmd_ = LayerState(1, consts_);
    s_is_syn_.assign(plastic_ ? n_p : 0, SynapseState{});
    is_l_syn_.assign(plastic_ ? n_pool : 0, SynapseState{});
}

size_t Network::synapse_count(SynapseGroup group) const {
    const size_t n_p = static_cast<size_t>(topo_.width) * topo_.height;
    const size_t n_pool = static_cast<size_t>(topo_.pooled_width()) * topo_.pooled_height();
    auto ring_total = [&](const std::vector<KernelTap>& ring) {
        size_t count = 0;
        for (int32_t y = 0; y < topo_.height; ++y) {
            for (int32_t x = 0; x < topo_.width; ++x) {
                for (const auto& tap : ring) {
                    const int32_t tx = x + tap.dx;
                    const int32_t ty = y + tap.dy;
                    if (tx >= 0 && tx < topo_.width && ty >= 0 && ty < topo_.height) ++count;
                }
            }
        }
        return count;
    };
    switch (group) {
        case SynapseGroup::PS_Centre: return n_p;
        case SynapseGroup::PS_RingA: return ring_total(topo_.ring_a);
        case SynapseGroup::PS_RingB: return ring_total(topo_.ring_b);
        case SynapseGroup::P_IP: return n_p;
        case SynapseGroup::S_IS: return n_p;
        case SynapseGroup::IS_L: return n_pool;
        case SynapseGroup::IP_L: return n_pool;
    }
    return 0;
}

SimResult Network::simulate(const EventStream& stream, const RecordFlags& record) {
    const EventStream* input = &stream;
    EventStream pooled;
    if (stream.width != topo_.width || stream.height != topo_.height) {
        pooled = pool_to_grid(stream, topo_.width, topo_.height);
        input = &pooled;
    }
    reset();

    const double dt = kDtMs;
    const int64_t dt_us = 100;
    const int64_t n_steps = (input->duration_us + dt_us - 1) / dt_us;
    const int32_t w = topo_.width;
    const int32_t pw = topo_.pooled_width();
    const int32_t pool = topo_.pooling;

    SimResult result;
    result.dt_ms = dt;
    if (record.voltage) result.lgmd_voltage_mv.reserve(static_cast<size_t>(n_steps));
    if (record.rasters) result.rasters.resize(5);

    // Charges per spike, fixed for the whole run. The ring charges
    // inhA_S*q_eS and inhB_S*q_eS are budgets for the whole ring; the
    // distance weights distribute them across the taps.
    auto ring_sum = [](const std::vector<KernelTap>& ring) {
        double sum = 0.0;
        for (const auto& tap : ring) sum += tap.weight;
        return sum > 0.0 ? sum : 1.0;
    };
    const double q_eS = params_.q_eS;
    const double q_iA_S = params_.inhA_S * params_.q_eS / ring_sum(topo_.ring_a);
    const double q_iB_S = params_.inhB_S * params_.q_eS / ring_sum(topo_.ring_b);
    const double q_eIP = params_.q_eIP;
    const double q_eIS = params_.q_eIS;
    const double q_eL = params_.q_eL;
    const double q_iA_L = params_.inhA_L * params_.q_eL;
    const double q_eP = params_.q_eP;

    const SynapticTaus taus{params_.tau_e, params_.tau_iA, params_.tau_iB};
    const AdaptationParams no_adapt{};

    // Injections queued for the next step (one-step synaptic delay).
    std::vector<double> pend_s_e(s_.size(), 0.0), pend_s_iA(s_.size(), 0.0),
        pend_s_iB(s_.size(), 0.0);
    std::vector<double> pend_ip_e(ip_.size(), 0.0), pend_is_e(is_.size(), 0.0);
    double pend_l_e = 0.0, pend_l_iA = 0.0;

    std::vector<uint32_t> sp_p, sp_s, sp_ip, sp_is, sp_l;
    size_t ev = 0;
    const auto& events = input->events;
    while (ev < events.size() && events[ev].t_us == 0) ++ev;  // (t, t+dt] bins

    int64_t step = 0;
    const char* layer = "";
    try {
        for (step = 0; step < n_steps; ++step) {
            const int64_t bin_end = (step + 1) * dt_us;
            const double now_ms = static_cast<double>(step + 1) * dt;

            // Input events for this bin drive P directly.
            while (ev < events.size() && events[ev].t_us <= bin_end) {
                const auto& e = events[ev];
                p_.I_e[static_cast<size_t>(e.y) * w + e.x] += q_eP;
                ++ev;
            }

            // Deliver last step's spikes.
            for (size_t i = 0; i < s_.size(); ++i) {
                s_.I_e[i] += pend_s_e[i];
                s_.I_iA[i] += pend_s_iA[i];
                s_.I_iB[i] += pend_s_iB[i];
                pend_s_e[i] = pend_s_iA[i] = pend_s_iB[i] = 0.0;
            }
            for (size_t i = 0; i < ip_.size(); ++i) {
                ip_.I_e[i] += pend_ip_e[i];
                pend_ip_e[i] = 0.0;
                is_.I_e[i] += pend_is_e[i];
                pend_is_e[i] = 0.0;
            }
            lgmd_.I_e[0] += pend_l_e;
            lgmd_.I_iA[0] += pend_l_iA;
            pend_l_e = pend_l_iA = 0.0;

            layer = "P";
            step_layer(p_, consts_, taus, no_adapt, dt, sp_p);
            layer = "S";
            step_layer(s_, consts_, taus, no_adapt, dt, sp_s);
            layer = "IP";
            step_layer(ip_, consts_, taus, no_adapt, dt, sp_ip);
            layer = "IS";
            step_layer(is_, consts_, taus, no_adapt, dt, sp_is);
            layer = "LGMD";
            step_layer(lgmd_, consts_, taus, lgmd_adapt_, dt, sp_l);

            // P spikes: centre excitation plus the two inhibitory rings onto
            // S, and the sum-pool tap onto IP.
            for (uint32_t idx : sp_p) {
                const int32_t x = static_cast<int32_t>(idx % w);
                const int32_t y = static_cast<int32_t>(idx / w);
                pend_s_e[idx] += q_eS;
                for (const auto& tap : topo_.ring_a) {
                    const int32_t tx = x + tap.dx;
                    const int32_t ty = y + tap.dy;
                    if (tx >= 0 && tx < w && ty >= 0 && ty < topo_.height)
                        pend_s_iA[static_cast<size_t>(ty) * w + tx] += q_iA_S * tap.weight;
                }
                for (const auto& tap : topo_.ring_b) {
                    const int32_t tx = x + tap.dx;
                    const int32_t ty = y + tap.dy;
                    if (tx >= 0 && tx < w && ty >= 0 && ty < topo_.height)
                        pend_s_iB[static_cast<size_t>(ty) * w + tx] += q_iB_S * tap.weight;
                }
                pend_ip_e[static_cast<size_t>(y / pool) * pw + (x / pool)] += q_eIP;
            }

            // S spikes pool onto IS (plastic in P/AP).
            for (uint32_t idx : sp_s) {
                const size_t target =
                    static_cast<size_t>((idx / w) / pool) * pw + ((idx % w) / pool);
                if (plastic_) {
                    auto& syn = s_is_syn_[idx];
                    decay_traces(syn, stdp_, now_ms);
                    pend_is_e[target] += on_pre_spike(syn, stdp_, q_eIS);
                } else {
                    pend_is_e[target] += q_eIS;
                }
            }

            // IS spikes excite the LGMD (plastic) and are post-synaptic for
            // their S -> IS block.
            for (uint32_t idx : sp_is) {
                if (plastic_) {
                    const int32_t bx = static_cast<int32_t>(idx % pw);
                    const int32_t by = static_cast<int32_t>(idx / pw);
                    for (int32_t oy = 0; oy < pool; ++oy) {
                        const size_t row = static_cast<size_t>(by * pool + oy) * w;
                        for (int32_t ox = 0; ox < pool; ++ox) {
                            auto& syn = s_is_syn_[row + bx * pool + ox];
                            decay_traces(syn, stdp_, now_ms);
                            on_post_spike(syn, stdp_);
                        }
                    }
                    auto& syn = is_l_syn_[idx];
                    decay_traces(syn, stdp_, now_ms);
                    pend_l_e += on_pre_spike(syn, stdp_, q_eL);
                } else {
                    pend_l_e += q_eL;
                }
            }

            pend_l_iA += q_iA_L * static_cast<double>(sp_ip.size());

            if (!sp_l.empty()) {
                result.lgmd_spike_times_ms.push_back(now_ms);
                if (plastic_) {
                    for (auto& syn : is_l_syn_) {
                        decay_traces(syn, stdp_, now_ms);
                        on_post_spike(syn, stdp_);
                    }
                }
            }

            if (record.voltage) result.lgmd_voltage_mv.push_back(lgmd_.V[0]);
            if (record.rasters) {
                auto push = [&](size_t layer, const std::vector<uint32_t>& spikes) {
                    for (uint32_t s : spikes) result.rasters[layer].push_back({now_ms, s});
                };
                push(0, sp_p);
                push(1, sp_s);
                push(2, sp_ip);
                push(3, sp_is);
                push(4, sp_l);
            }
        }
    } catch (const NumericalBlowup& blowup) {
        const double t_ms = static_cast<double>(step + 1) * dt;
        throw NumericalBlowup(blowup.neuron_index, std::string(blowup.what()) + " in layer " +
                                                       layer + " at t=" + std::to_string(t_ms) +
                                                       " ms");
    }
    return result;
}

}  // namespace lgmd
