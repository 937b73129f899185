#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lgmd {

enum class Variant : uint8_t { LGMD, A, P, AP };

Variant variant_from_string(const std::string& name);
std::string variant_name(Variant v);
bool variant_adapts(Variant v);   // A, AP
bool variant_plastic(Variant v);  // P, AP

struct AdaptationBlock {
    double a = 0.0;      // nS
    double b = 0.0;      // pA
    double tau_w = 1.0;  // ms
    bool operator==(const AdaptationBlock&) const = default;
};

struct PlasticityBlock {
    double tau_pre = 1.0;
    double tau_post = 1.0;
    double delta_pre = 0.0;
    double delta_post = 0.0;
    bool operator==(const PlasticityBlock&) const = default;
};

// The tunable network parameters. Flattened order for the optimiser is the
// declaration order below, with the optional blocks appended when present.
struct ParamVector {
    double tau_e = 5.0;    // ms, excitatory decay
    double tau_iA = 5.0;   // ms, fast inhibitory decay
    double tau_iB = 5.0;   // ms, slow inhibitory decay
    double q_eP = 0.0;     // pA per input event into P
    double q_eS = 0.0;     // pA, P -> S excitation
    double q_eIP = 0.0;    // pA, P -> IP excitation
    double q_eIS = 0.0;    // pA, S -> IS excitation
    double q_eL = 0.0;     // pA, IS -> LGMD excitation
    double inhA_S = 0.0;   // fast-inhibition ratio at S
    double inhB_S = 0.0;   // slow-inhibition ratio at S
    double inhA_L = 0.0;   // fast-inhibition ratio at LGMD
    std::optional<AdaptationBlock> adaptation;
    std::optional<PlasticityBlock> plasticity;

    bool operator==(const ParamVector&) const = default;

    std::vector<double> flatten() const;
    static ParamVector from_flat(std::span<const double> flat, Variant variant);

    // Dimension of the flattened vector for a variant: 11 base parameters,
    // +3 adaptation, +4 plasticity.
    static size_t dimension(Variant variant);

    // Reference parameter set the model variants were published with.
    static ParamVector reference(Variant variant);
};

// Per-dimension box constraints of the optimisation space.
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    size_t dim() const { return lo.size(); }
    double clip(size_t d, double v) const;
    std::vector<double> clip(std::span<const double> v) const;
    bool contains(std::span<const double> v) const;

    // The published constraint table for a variant's flattened vector.
    static Bounds for_variant(Variant variant);
};

ParamVector clip_to_bounds(const ParamVector& raw, const Bounds& bounds);

// Names of the flattened components, for campaign log headers.
std::vector<std::string> param_names(Variant variant);

}  // namespace lgmd
