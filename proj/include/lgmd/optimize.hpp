#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lgmd/gp.hpp"
#include "lgmd/params.hpp"
#include "lgmd/rng.hpp"

namespace lgmd {

// Maximisation throughout; wrap minimisation problems by negation.
using Objective = std::function<double(std::span<const double>)>;

enum class DeStrategy : uint8_t { Rand1Bin, RandToBest2Bin, Rand2Bin, CurrToRand1 };
inline constexpr size_t kSadeStrategyCount = 4;

struct DeConfig {
    size_t np = 0;       // 0 -> ceil(10 D / 3)
    double f = 0.6607;
    double cr = 0.9426;
};

// Donor vector for the given strategy; r-indices are distinct and != i and
// the result is clipped to the bounds.
std::vector<double> de_donor(const std::vector<std::vector<double>>& population, size_t i,
                             double f, size_t best_index, DeStrategy strategy,
                             const Bounds& bounds, Rng& rng);

// Binomial crossover: component j comes from the donor iff rand(j) <= cr or
// j equals the forced index.
std::vector<double> de_crossover(std::span<const double> parent, std::span<const double> donor,
                                 double cr, Rng& rng);

// Survivor rule: the trial replaces the parent iff strictly fitter
// (NaN trials never survive).
bool de_trial_survives(double parent_fitness, double trial_fitness);

// Strategy and rate self-adaptation state.
struct SadeState {
    size_t lp = 3;  // learning period, generations
    std::vector<double> probabilities =
        std::vector<double>(kSadeStrategyCount, 1.0 / kSadeStrategyCount);
    // Per-generation success/failure counts and successful CR values over the
    // trailing LP generations.
    struct GenerationRecord {
        size_t successes[kSadeStrategyCount] = {};
        size_t failures[kSadeStrategyCount] = {};
        std::vector<double> successful_cr[kSadeStrategyCount];
    };
    std::vector<GenerationRecord> window;
    size_t completed_generations = 0;

    size_t pick_strategy(Rng& rng) const;
};

struct SampledRates {
    double f;
    double cr;
};

// F ~ N(0.5, 0.3) used as drawn; CR ~ N(0.5, 0.3) clipped to [0,1] while
// generation <= LP, afterwards N(median successful CR, 0.1) clipped.
SampledRates sade_sample_rates(const SadeState& state, size_t strategy, size_t generation,
                               Rng& rng);

// Fold the newest generation record into the window and refresh the strategy
// probabilities (success-rate proportional with an epsilon floor).
void sade_update_probabilities(SadeState& state, const SadeState::GenerationRecord& generation);

// Maximise the acquisition over 4096 uniform candidates plus a short
// coordinate pattern search around the best one (at most 64 extra
// evaluations); deterministic lowest-index tie-break.
std::vector<double> bo_step(const GpModel& model, const Bounds& bounds, double best_f,
                            const AcquisitionConfig& acq, Rng& rng);

enum class Method : uint8_t { De, Sade, BoPi, BoEi, BoUcb, Rng };
Method method_from_string(const std::string& name);
std::string method_name(Method method);

struct CampaignConfig {
    Method method = Method::Sade;
    uint64_t seed = 1;
    size_t budget = 1000;
    size_t np = 0;             // 0 -> ceil(10 D / 3)
    size_t lp = 3;             // SADE learning period
    double de_f = 0.6607;
    double de_cr = 0.9426;
    AcquisitionConfig acquisition;  // BO methods override .kind from `method`
    size_t jobs = 1;
    size_t stall_factor = 10;       // converged after stall_factor*np flat evals
    size_t gp_refit_interval = 5;   // full hyper-parameter refit cadence
};

struct EvalRecord {
    size_t index = 0;
    std::vector<double> params;
    double fitness = 0.0;
    double best_so_far = 0.0;
};

struct CampaignResult {
    std::vector<EvalRecord> log;
    std::vector<double> best_params;
    double best_fitness = 0.0;
    size_t evaluations = 0;
    bool converged = false;
    size_t np = 0;  // resolved population size
};

// Run one optimisation campaign until the stall rule triggers (no strict
// improvement of the best fitness for stall_factor*NP consecutive
// evaluations, counted after the initial design) or the budget is exhausted.
CampaignResult run_campaign(const CampaignConfig& config, const Objective& objective,
                            const Bounds& bounds);

}  // namespace lgmd
