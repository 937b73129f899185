#include "lgmd/params.hpp"

#include <algorithm>

#include "lgmd/errors.hpp"

namespace lgmd {

Variant variant_from_string(const std::string& name) {
    if (name == "LGMD" || name == "lgmd") return Variant::LGMD;
    if (name == "A" || name == "a") return Variant::A;
    if (name == "P" || name == "p") return Variant::P;
    if (name == "AP" || name == "ap") return Variant::AP;
    throw ConfigError("unknown variant: " + name);
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::LGMD: return "LGMD";
        case Variant::A: return "A";
        case Variant::P: return "P";
        case Variant::AP: return "AP";
    }
    return "?";
}

bool variant_adapts(Variant v) { return v == Variant::A || v == Variant::AP; }
bool variant_plastic(Variant v) { return v == Variant::P || v == Variant::AP; }

size_t ParamVector::dimension(Variant variant) {
    size_t d = 11;
    if (variant_adapts(variant)) d += 3;
    if (variant_plastic(variant)) d += 4;
    return d;
}

std::vector<double> ParamVector::flatten() const {
    std::vector<double> flat{tau_e, tau_iA, tau_iB, q_eP,   q_eS,  q_eIP,
                             q_eIS, q_eL,   inhA_S, inhB_S, inhA_L};
    if (adaptation) {
        flat.push_back(adaptation->a);
        flat.push_back(adaptation->b);
        flat.push_back(adaptation->tau_w);
    }
    if (plasticity) {
        flat.push_back(plasticity->tau_pre);
        flat.push_back(plasticity->tau_post);
        flat.push_back(plasticity->delta_pre);
        flat.push_back(plasticity->delta_post);
    }
    return flat;
}

ParamVector ParamVector::from_flat(std::span<const double> flat, Variant variant) {
    if (flat.size() != dimension(variant))
        throw ConfigError("flat parameter vector has wrong dimension for variant " +
                          variant_name(variant));
    ParamVector p;
    p.tau_e = flat[0];
    p.tau_iA = flat[1];
    p.tau_iB = flat[2];
    p.q_eP = flat[3];
    p.q_eS = flat[4];
    p.q_eIP = flat[5];
    p.q_eIS = flat[6];
    p.q_eL = flat[7];
    p.inhA_S = flat[8];
    p.inhB_S = flat[9];
    p.inhA_L = flat[10];
    size_t i = 11;
    if (variant_adapts(variant)) {
        p.adaptation = AdaptationBlock{flat[i], flat[i + 1], flat[i + 2]};
        i += 3;
    }
    if (variant_plastic(variant)) {
        p.plasticity = PlasticityBlock{flat[i], flat[i + 1], flat[i + 2], flat[i + 3]};
    }
    return p;
}

ParamVector ParamVector::reference(Variant variant) {
    ParamVector p;
    p.tau_e = 5.87;
    p.tau_iA = 3.57;
    p.tau_iB = 4.20;
    p.q_eP = 1014.00;
    p.q_eS = 4635.30;
    p.q_eIP = 84.26;
    p.q_eIS = 168.11;
    p.q_eL = variant_adapts(variant) ? 100.00 : 80.00;
    p.inhA_S = 1.19;
    p.inhB_S = 1.50;
    p.inhA_L = 0.14;
    if (variant_adapts(variant)) p.adaptation = AdaptationBlock{0.79, 14.51, 30.00};
    if (variant_plastic(variant)) p.plasticity = PlasticityBlock{1.56, 10.03, 0.031, 0.027};
    return p;
}

double Bounds::clip(size_t d, double v) const { return std::clamp(v, lo[d], hi[d]); }

std::vector<double> Bounds::clip(std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    for (size_t d = 0; d < out.size() && d < lo.size(); ++d) out[d] = clip(d, out[d]);
    return out;
}

bool Bounds::contains(std::span<const double> v) const {
    for (size_t d = 0; d < v.size(); ++d) {
        if (v[d] < lo[d] || v[d] > hi[d]) return false;
    }
    return true;
}

Bounds Bounds::for_variant(Variant variant) {
    Bounds b;
    b.lo = {1, 1, 1, 0, 0, 0, 0, 0, 0.04, 0.24, 0.019};
    b.hi = {10, 20, 25, 1363, 5000, 230, 270, 472, 1.22, 1.5, 1.3};
    if (variant_adapts(variant)) {
        b.lo.insert(b.lo.end(), {1, 40, 1});
        b.hi.insert(b.hi.end(), {8, 141, 150});
    }
    if (variant_plastic(variant)) {
        b.lo.insert(b.lo.end(), {1, 1, 1e-16, 1e-16});
        b.hi.insert(b.hi.end(), {25, 25, 0.05, 0.05});
    }
    return b;
}

ParamVector clip_to_bounds(const ParamVector& raw, const Bounds& bounds) {
    Variant variant = Variant::LGMD;
    if (raw.adaptation && raw.plasticity) {
        variant = Variant::AP;
    } else if (raw.adaptation) {
        variant = Variant::A;
    } else if (raw.plasticity) {
        variant = Variant::P;
    }
    auto flat = raw.flatten();
    if (flat.size() != bounds.dim()) throw ConfigError("bounds dimension mismatch");
    return ParamVector::from_flat(bounds.clip(flat), variant);
}

std::vector<std::string> param_names(Variant variant) {
    std::vector<std::string> names{"tau_e",  "tau_iA", "tau_iB", "q_eP",   "q_eS", "q_eIP",
                                   "q_eIS",  "q_eL",   "inhA_S", "inhB_S", "inhA_L"};
    if (variant_adapts(variant)) {
        names.insert(names.end(), {"a", "b", "tau_w"});
    }
    if (variant_plastic(variant)) {
        names.insert(names.end(), {"tau_pre", "tau_post", "delta_pre", "delta_post"});
    }
    return names;
}

}  // namespace lgmd
