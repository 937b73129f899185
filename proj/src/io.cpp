#include "lgmd/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lgmd/errors.hpp"
#include "lgmd/version.hpp"

namespace lgmd {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json params_to_json(const ParamVector& p) {
    json j;
    j["tau_e"] = p.tau_e;
    j["tau_iA"] = p.tau_iA;
    j["tau_iB"] = p.tau_iB;
    j["q_eP"] = p.q_eP;
    j["q_eS"] = p.q_eS;
    j["q_eIP"] = p.q_eIP;
    j["q_eIS"] = p.q_eIS;
    j["q_eL"] = p.q_eL;
    j["inhA_S"] = p.inhA_S;
    j["inhB_S"] = p.inhB_S;
    j["inhA_L"] = p.inhA_L;
    if (p.adaptation) {
        j["adaptation"] = {{"a", p.adaptation->a},
                           {"b", p.adaptation->b},
                           {"tau_w", p.adaptation->tau_w}};
    }
    if (p.plasticity) {
        j["plasticity"] = {{"tau_pre", p.plasticity->tau_pre},
                           {"tau_post", p.plasticity->tau_post},
                           {"delta_pre", p.plasticity->delta_pre},
                           {"delta_post", p.plasticity->delta_post}};
    }
    return j;
}

ParamVector params_from_json(const json& j) {
    ParamVector p;
    p.tau_e = j.at("tau_e").get<double>();
    p.tau_iA = j.at("tau_iA").get<double>();
    p.tau_iB = j.at("tau_iB").get<double>();
    p.q_eP = j.at("q_eP").get<double>();
    p.q_eS = j.at("q_eS").get<double>();
    p.q_eIP = j.at("q_eIP").get<double>();
    p.q_eIS = j.at("q_eIS").get<double>();
    p.q_eL = j.at("q_eL").get<double>();
    p.inhA_S = j.at("inhA_S").get<double>();
    p.inhB_S = j.at("inhB_S").get<double>();
    p.inhA_L = j.at("inhA_L").get<double>();
    if (j.contains("adaptation")) {
        const auto& a = j.at("adaptation");
        p.adaptation = AdaptationBlock{a.at("a").get<double>(), a.at("b").get<double>(),
                                       a.at("tau_w").get<double>()};
    }
    if (j.contains("plasticity")) {
        const auto& s = j.at("plasticity");
        p.plasticity =
            PlasticityBlock{s.at("tau_pre").get<double>(), s.at("tau_post").get<double>(),
                            s.at("delta_pre").get<double>(), s.at("delta_post").get<double>()};
    }
    return p;
}

json taps_to_json(const std::vector<KernelTap>& taps) {
    json arr = json::array();
    for (const auto& tap : taps) arr.push_back({{"dx", tap.dx}, {"dy", tap.dy}, {"w", tap.weight}});
    return arr;
}

std::vector<KernelTap> taps_from_json(const json& arr) {
    std::vector<KernelTap> taps;
    for (const auto& t : arr)
        taps.push_back({t.at("dx").get<int>(), t.at("dy").get<int>(), t.at("w").get<double>()});
    return taps;
}

}  // namespace

std::string network_config_json(const NetworkConfig& c) {
    json j;
    j["topology"] = {{"width", c.topology.width},
                     {"height", c.topology.height},
                     {"pooling", c.topology.pooling},
                     {"ring_a", taps_to_json(c.topology.ring_a)},
                     {"ring_b", taps_to_json(c.topology.ring_b)}};
    j["variant"] = variant_name(c.variant);
    j["neuron"] = {{"C_pF", c.neuron.C},       {"gL_nS", c.neuron.g_L},
                   {"EL_mV", c.neuron.E_L},    {"VT_mV", c.neuron.V_T},
                   {"DeltaT_mV", c.neuron.Delta_T}, {"Vr_mV", c.neuron.V_r}};
    j["params"] = params_to_json(c.params);
    j["clamp_c"] = c.clamp_c;
    j["detector"] = {{"window_ms", c.detector.window_ms},
                     {"threshold", c.detector.threshold},
                     {"lead_fraction", c.detector.lead_fraction}};
    j["score"] = {{"k", c.score.k},
                  {"l", c.score.l},
                  {"c", c.score.score_c},
                  {"V_spk_mV", c.score.v_spk},
                  {"V_rest_mV", c.score.v_rest}};
    return j.dump(2);
}

NetworkConfig parse_network_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    try {
        NetworkConfig c;
        if (j.contains("topology")) {
            const auto& t = j.at("topology");
            const int32_t w = t.value("width", 32);
            const int32_t h = t.value("height", 32);
            const int32_t pool = t.value("pooling", 4);
            c.topology = Topology::standard(w, h, pool);
            if (t.contains("ring_a")) c.topology.ring_a = taps_from_json(t.at("ring_a"));
            if (t.contains("ring_b")) c.topology.ring_b = taps_from_json(t.at("ring_b"));
        }
        if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
        if (j.contains("neuron")) {
            const auto& n = j.at("neuron");
            c.neuron.C = n.value("C_pF", c.neuron.C);
            c.neuron.g_L = n.value("gL_nS", c.neuron.g_L);
            c.neuron.E_L = n.value("EL_mV", c.neuron.E_L);
            c.neuron.V_T = n.value("VT_mV", c.neuron.V_T);
            c.neuron.Delta_T = n.value("DeltaT_mV", c.neuron.Delta_T);
            c.neuron.V_r = n.value("Vr_mV", c.neuron.E_L);
        }
        // Explicit configs are taken literally, out-of-bounds values included;
        // only the optimiser clips.
        if (j.contains("params")) {
            c.params = params_from_json(j.at("params"));
        } else {
            c.params = ParamVector::reference(c.variant);
        }
        c.clamp_c = j.value("clamp_c", c.clamp_c);
        if (j.contains("detector")) {
            const auto& d = j.at("detector");
            c.detector.window_ms = d.value("window_ms", c.detector.window_ms);
            c.detector.threshold = d.value("threshold", c.detector.threshold);
            c.detector.lead_fraction = d.value("lead_fraction", c.detector.lead_fraction);
        }
        if (j.contains("score")) {
            const auto& s = j.at("score");
            c.score.k = s.value("k", c.score.k);
            c.score.l = s.value("l", c.score.l);
            c.score.score_c = s.value("c", c.score.score_c);
            c.score.v_spk = s.value("V_spk_mV", c.neuron.V_T);
            c.score.v_rest = s.value("V_rest_mV", c.neuron.E_L);
        } else {
            c.score.v_spk = c.neuron.V_T;
            c.score.v_rest = c.neuron.E_L;
        }
        if (variant_adapts(c.variant) && !c.params.adaptation)
            throw ConfigError("variant " + variant_name(c.variant) +
                              " requires params.adaptation");
        if (variant_plastic(c.variant) && !c.params.plasticity)
            throw ConfigError("variant " + variant_name(c.variant) +
                              " requires params.plasticity");
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
}

NetworkConfig load_network_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_network_config(buffer.str());
}

std::string config_hash(const NetworkConfig& config) {
    const std::string dump = network_config_json(config);
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string report_json(const FitnessReport& r, uint64_t seed, const std::string& cfg_hash) {
    json j;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    j["seed"] = seed;
    j["config_hash"] = cfg_hash;
    j["f_acc"] = r.f_acc;
    j["f"] = r.f;
    j["score"] = r.score;
    j["sseos"] = r.sseos;
    j["confusion"] = {{"tp", r.confusion.tp},
                      {"fp", r.confusion.fp},
                      {"tn", r.confusion.tn},
                      {"fn", r.confusion.fn}};
    j["metrics"] = {{"acc", r.metrics.acc},
                    {"sen", r.metrics.sen},
                    {"pre", r.metrics.pre},
                    {"spe", r.metrics.spe}};
    j["undefined"] = {{"sen", r.metrics.sen_undefined},
                      {"pre", r.metrics.pre_undefined},
                      {"spe", r.metrics.spe_undefined}};
    return j.dump(2);
}

std::string report_csv_header() { return "f_acc,f,score,sseos,tp,fp,tn,fn,acc,sen,pre,spe"; }

std::string report_csv_row(const FitnessReport& r) {
    std::ostringstream out;
    out << format_double(r.f_acc) << ',' << format_double(r.f) << ',' << format_double(r.score)
        << ',' << format_double(r.sseos) << ',' << r.confusion.tp << ',' << r.confusion.fp << ','
        << r.confusion.tn << ',' << r.confusion.fn << ',' << format_double(r.metrics.acc) << ','
        << format_double(r.metrics.sen) << ',' << format_double(r.metrics.pre) << ','
        << format_double(r.metrics.spe);
    return out.str();
}

void write_campaign_csv(std::ostream& out, const CampaignResult& result, Method method,
                        uint64_t seed, const std::vector<std::string>& names,
                        const std::string& cfg_hash) {
    out << "# " << kToolName << ' ' << kToolVersion << " seed=" << seed << " config=" << cfg_hash
        << '\n';
    out << "eval_index,method,seed,fitness,best_so_far";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& rec : result.log) {
        out << rec.index << ',' << method_name(method) << ',' << seed << ','
            << format_double(rec.fitness) << ',' << format_double(rec.best_so_far);
        for (double p : rec.params) out << ',' << format_double(p);
        out << '\n';
    }
}

}  // namespace lgmd
