#include "lgmd/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "lgmd/errors.hpp"

namespace lgmd {

namespace {

size_t default_np(size_t dim) {
    return static_cast<size_t>((10 * dim + 2) / 3);  // ceil(10 dim / 3)
}

size_t strategy_distinct_indices(DeStrategy s) {
    switch (s) {
        case DeStrategy::Rand1Bin: return 3;
        case DeStrategy::RandToBest2Bin: return 4;
        case DeStrategy::Rand2Bin: return 5;
        case DeStrategy::CurrToRand1: return 3;
    }
    return 3;
}

}  // namespace

std::vector<double> de_donor(const std::vector<std::vector<double>>& population, size_t i,
                             double f, size_t best_index, DeStrategy strategy,
                             const Bounds& bounds, Rng& rng) {
    const size_t np = population.size();
    const size_t needed = strategy_distinct_indices(strategy);
    if (np < needed + 1)
        throw PopulationTooSmall("strategy needs " + std::to_string(needed + 1) +
                                 " population members, have " + std::to_string(np));

    size_t r[5] = {};
    for (size_t k = 0; k < needed; ++k) {
        bool distinct = false;
        while (!distinct) {
            r[k] = rng.uniform_int(np);
            distinct = r[k] != i;
            for (size_t j = 0; j < k && distinct; ++j) distinct = r[k] != r[j];
        }
    }

    const size_t dim = bounds.dim();
    std::vector<double> donor(dim);
    switch (strategy) {
        case DeStrategy::Rand1Bin:
            for (size_t d = 0; d < dim; ++d)
                donor[d] = population[r[0]][d] + f * (population[r[1]][d] - population[r[2]][d]);
            break;
        case DeStrategy::RandToBest2Bin:
            for (size_t d = 0; d < dim; ++d)
                donor[d] = population[i][d] + f * (population[best_index][d] - population[i][d]) +
                           f * (population[r[0]][d] - population[r[1]][d]) +
                           f * (population[r[2]][d] - population[r[3]][d]);
            break;
        case DeStrategy::Rand2Bin:
            for (size_t d = 0; d < dim; ++d)
                donor[d] = population[r[0]][d] + f * (population[r[1]][d] - population[r[2]][d]) +
                           f * (population[r[3]][d] - population[r[4]][d]);
            break;
        case DeStrategy::CurrToRand1: {
            const double mix = rng.uniform();
            for (size_t d = 0; d < dim; ++d)
                donor[d] = population[i][d] + mix * (population[r[0]][d] - population[i][d]) +
                           f * (population[r[1]][d] - population[r[2]][d]);
            break;
        }
    }
    for (size_t d = 0; d < dim; ++d) donor[d] = bounds.clip(d, donor[d]);
    return donor;
}

std::vector<double> de_crossover(std::span<const double> parent, std::span<const double> donor,
                                 double cr, Rng& rng) {
    const size_t dim = parent.size();
    std::vector<double> trial(parent.begin(), parent.end());
    const size_t forced = rng.uniform_int(dim);
    for (size_t j = 0; j < dim; ++j) {
        if (rng.uniform() <= cr || j == forced) trial[j] = donor[j];
    }
    return trial;
}

bool de_trial_survives(double parent_fitness, double trial_fitness) {
    if (std::isnan(trial_fitness)) {
        std::fprintf(stderr, "warning: trial fitness is NaN, parent retained\n");
        return false;
    }
    return trial_fitness > parent_fitness;
}

// ---------------------------------------------------------------------------
// SADE
// ---------------------------------------------------------------------------

size_t SadeState::pick_strategy(Rng& rng) const {
    const double u = rng.uniform();
    double cum = 0.0;
    for (size_t k = 0; k < kSadeStrategyCount; ++k) {
        cum += probabilities[k];
        if (u < cum) return k;
    }
    return kSadeStrategyCount - 1;
}

SampledRates sade_sample_rates(const SadeState& state, size_t strategy, size_t generation,
                               Rng& rng) {
    SampledRates rates;
    rates.f = rng.normal(0.5, 0.3);  // used as drawn, may be negative
    double cr;
    if (generation <= state.lp) {
        cr = rng.normal(0.5, 0.3);
    } else {
        // Median of the successful CR values archived for this strategy.
        std::vector<double> archive;
        for (const auto& gen : state.window)
            archive.insert(archive.end(), gen.successful_cr[strategy].begin(),
                           gen.successful_cr[strategy].end());
        double centre = 0.5;  // empty archive falls back to the warm-up mean
        if (!archive.empty()) {
            std::sort(archive.begin(), archive.end());
            const size_t n = archive.size();
            centre = n % 2 == 1 ? archive[n / 2]
                                : 0.5 * (archive[n / 2 - 1] + archive[n / 2]);
        }
        cr = rng.normal(centre, 0.1);
    }
    rates.cr = std::clamp(cr, 0.0, 1.0);
    return rates;
}

void sade_update_probabilities(SadeState& state, const SadeState::GenerationRecord& generation) {
    state.window.push_back(generation);
    if (state.window.size() > state.lp) state.window.erase(state.window.begin());
    ++state.completed_generations;

    if (state.completed_generations < state.lp) {
        std::fill(state.probabilities.begin(), state.probabilities.end(),
                  1.0 / kSadeStrategyCount);
        return;
    }
    constexpr double kEps = 0.01;
    double total = 0.0;
    double rates[kSadeStrategyCount];
    for (size_t k = 0; k < kSadeStrategyCount; ++k) {
        size_t s = 0, f = 0;
        for (const auto& gen : state.window) {
            s += gen.successes[k];
            f += gen.failures[k];
        }
        rates[k] = static_cast<double>(s) / (static_cast<double>(s + f) + kEps) + kEps;
        total += rates[k];
    }
    for (size_t k = 0; k < kSadeStrategyCount; ++k) state.probabilities[k] = rates[k] / total;
}

// ---------------------------------------------------------------------------
// Bayesian optimisation step
// ---------------------------------------------------------------------------

std::vector<double> bo_step(const GpModel& model, const Bounds& bounds, double best_f,
                            const AcquisitionConfig& acq, Rng& rng) {
    const size_t dim = bounds.dim();
    constexpr size_t kCandidates = 4096;
    constexpr size_t kRefineBudget = 64;
    constexpr size_t kRefineSteps = 20;

    auto score_unit = [&](std::span<const double> x) {
        const auto post = model.predict(x);
        return acquisition_value(post.mean, post.sd, best_f, acq);
    };

    std::vector<double> best_x(dim);
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> x(dim);
    for (size_t c = 0; c < kCandidates; ++c) {
        for (size_t d = 0; d < dim; ++d) x[d] = rng.uniform();
        const double val = score_unit(x);
        if (val > best_val) {  // strict >: ties keep the lowest index
            best_val = val;
            best_x = x;
        }
    }

    // Coordinate pattern search around the winning candidate.
    double step = 0.05;
    size_t used = 0;
    for (size_t s = 0; s < kRefineSteps && used < kRefineBudget && step > 1e-5; ++s) {
        bool improved = false;
        for (size_t d = 0; d < dim && used < kRefineBudget; ++d) {
            for (double dir : {+1.0, -1.0}) {
                if (used >= kRefineBudget) break;
                std::vector<double> q = best_x;
                q[d] = std::clamp(q[d] + dir * step, 0.0, 1.0);
                if (q[d] == best_x[d]) continue;
                ++used;
                const double val = score_unit(q);
                if (val > best_val) {
                    best_val = val;
                    best_x = std::move(q);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    std::vector<double> out(dim);
    for (size_t d = 0; d < dim; ++d)
        out[d] = bounds.clip(d, bounds.lo[d] + best_x[d] * (bounds.hi[d] - bounds.lo[d]));
    return out;
}

// ---------------------------------------------------------------------------
// Campaign driver
// ---------------------------------------------------------------------------

Method method_from_string(const std::string& name) {
    if (name == "de") return Method::De;
    if (name == "sade") return Method::Sade;
    if (name == "bo-pi" || name == "bpoi") return Method::BoPi;
    if (name == "bo-ei" || name == "bei") return Method::BoEi;
    if (name == "bo-ucb" || name == "bucb") return Method::BoUcb;
    if (name == "rng" || name == "random") return Method::Rng;
    throw ConfigError("unknown method: " + name);
}

std::string method_name(Method method) {
    switch (method) {
        case Method::De: return "de";
        case Method::Sade: return "sade";
        case Method::BoPi: return "bo-pi";
        case Method::BoEi: return "bo-ei";
        case Method::BoUcb: return "bo-ucb";
        case Method::Rng: return "rng";
    }
    return "?";
}

namespace {

struct CampaignDriver {
    const CampaignConfig& cfg;
    const Objective& objective;
    const Bounds& bounds;
    size_t np;
    size_t stall_limit;

    CampaignResult result;
    double best = -std::numeric_limits<double>::infinity();
    size_t stall = 0;
    bool counting = false;  // stall counting starts after the initial design
    bool stopped = false;

    // Evaluate points (possibly in parallel) and merge in index order.
    std::vector<double> evaluate(const std::vector<std::vector<double>>& points) {
        std::vector<double> fitness(points.size());
        if (cfg.jobs <= 1 || points.size() <= 1) {
            for (size_t i = 0; i < points.size(); ++i) fitness[i] = objective(points[i]);
        } else {
            std::atomic<size_t> next{0};
            auto worker = [&]() {
                size_t i;
                while ((i = next.fetch_add(1)) < points.size()) fitness[i] = objective(points[i]);
            };
            std::vector<std::thread> threads;
            const size_t n_threads = std::min(cfg.jobs, points.size());
            threads.reserve(n_threads);
            for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
            for (auto& t : threads) t.join();
        }
        return fitness;
    }

    void record(const std::vector<double>& params, double fitness) {
        const bool improved = !std::isnan(fitness) && fitness > best;
        if (improved) {
            best = fitness;
            result.best_params = params;
            stall = 0;
        } else if (counting) {
            ++stall;
        }
        EvalRecord rec;
        rec.index = result.log.size();
        rec.params = params;
        rec.fitness = fitness;
        rec.best_so_far = best;
        result.log.push_back(std::move(rec));
        if (result.log.size() >= cfg.budget) stopped = true;
        if (counting && stall >= stall_limit) {
            stopped = true;
            result.converged = true;
        }
    }

    // How many evaluations may still run before a stop is certain.
    size_t dispatch_cap() const {
        const size_t by_budget = cfg.budget - result.log.size();
        if (!counting) return by_budget;
        return std::min(by_budget, stall_limit - stall);
    }

    std::vector<double> random_point(Rng& rng) const {
        std::vector<double> x(bounds.dim());
        for (size_t d = 0; d < x.size(); ++d) x[d] = rng.uniform(bounds.lo[d], bounds.hi[d]);
        return x;
    }
};

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg, const Objective& objective,
                            const Bounds& bounds) {
    const size_t dim = bounds.dim();
    const size_t np = cfg.np > 0 ? cfg.np : default_np(dim);
    const bool is_bo =
        cfg.method == Method::BoPi || cfg.method == Method::BoEi || cfg.method == Method::BoUcb;
    const size_t init_size = is_bo ? 2 * dim + 2 : np;
    if (cfg.budget < init_size)
        throw ConfigError("budget " + std::to_string(cfg.budget) +
                          " below the initial design size " + std::to_string(init_size));

    CampaignDriver drv{cfg, objective, bounds, np, cfg.stall_factor * np};
    drv.result.np = np;
    Rng rng(cfg.seed);

    // Initial design: uniform over the bounds.
    std::vector<std::vector<double>> population(init_size);
    for (auto& x : population) x = drv.random_point(rng);
    {
        const auto fitness = drv.evaluate(population);
        for (size_t i = 0; i < population.size(); ++i) drv.record(population[i], fitness[i]);
    }
    drv.counting = true;
    std::vector<double> pop_fitness;
    for (size_t i = 0; i < init_size; ++i) pop_fitness.push_back(drv.result.log[i].fitness);

    AcquisitionConfig acq = cfg.acquisition;
    if (cfg.method == Method::BoPi) acq.kind = AcquisitionKind::Pi;
    if (cfg.method == Method::BoEi) acq.kind = AcquisitionKind::Ei;
    if (cfg.method == Method::BoUcb) acq.kind = AcquisitionKind::UcbFixed;
    acq.dim = dim;

    SadeState sade;
    sade.lp = cfg.lp;
    size_t generation = 0;

    // BO bookkeeping: observations in the unit cube plus hyper-fit cadence.
    std::vector<std::vector<double>> x_unit;
    std::vector<double> y_obs;
    GpModel model;
    size_t last_fit_obs = 0;
    auto to_unit = [&](const std::vector<double>& x) {
        std::vector<double> u(dim);
        for (size_t d = 0; d < dim; ++d)
            u[d] = (x[d] - bounds.lo[d]) / (bounds.hi[d] - bounds.lo[d]);
        return u;
    };

    while (!drv.stopped) {
        switch (cfg.method) {
            case Method::Rng: {
                const size_t batch = std::min(np, drv.dispatch_cap());
                std::vector<std::vector<double>> points(batch);
                for (auto& x : points) x = drv.random_point(rng);
                const auto fitness = drv.evaluate(points);
                for (size_t i = 0; i < batch && !drv.stopped; ++i)
                    drv.record(points[i], fitness[i]);
                break;
            }
            case Method::De:
            case Method::Sade: {
                ++generation;
                size_t best_index = 0;
                for (size_t i = 1; i < np; ++i)
                    if (pop_fitness[i] > pop_fitness[best_index]) best_index = i;

                std::vector<std::vector<double>> trials(np);
                std::vector<size_t> strategies(np, 0);
                std::vector<double> crs(np, cfg.de_cr);
                for (size_t i = 0; i < np; ++i) {
                    if (cfg.method == Method::De) {
                        const auto donor = de_donor(population, i, cfg.de_f, best_index,
                                                    DeStrategy::Rand1Bin, bounds, rng);
                        trials[i] = de_crossover(population[i], donor, cfg.de_cr, rng);
                    } else {
                        const size_t k = sade.pick_strategy(rng);
                        const auto rates = sade_sample_rates(sade, k, generation, rng);
                        strategies[i] = k;
                        crs[i] = rates.cr;
                        const auto strat = static_cast<DeStrategy>(k);
                        const auto donor =
                            de_donor(population, i, rates.f, best_index, strat, bounds, rng);
                        // current-to-rand/1 recombines arithmetically, no
                        // binomial crossover.
                        trials[i] = strat == DeStrategy::CurrToRand1
                                        ? donor
                                        : de_crossover(population[i], donor, rates.cr, rng);
                    }
                }

                SadeState::GenerationRecord gen_record;
                size_t done = 0;
                while (done < np && !drv.stopped) {
                    const size_t batch = std::min(np - done, drv.dispatch_cap());
                    std::vector<std::vector<double>> points(trials.begin() + done,
                                                            trials.begin() + done + batch);
                    const auto fitness = drv.evaluate(points);
                    for (size_t i = 0; i < batch && !drv.stopped; ++i) {
                        const size_t idx = done + i;
                        drv.record(trials[idx], fitness[i]);
                        const bool survives = de_trial_survives(pop_fitness[idx], fitness[i]);
                        if (survives) {
                            population[idx] = trials[idx];
                            pop_fitness[idx] = fitness[i];
                        }
                        if (cfg.method == Method::Sade) {
                            const size_t k = strategies[idx];
                            if (survives) {
                                ++gen_record.successes[k];
                                gen_record.successful_cr[k].push_back(crs[idx]);
                            } else {
                                ++gen_record.failures[k];
                            }
                        }
                    }
                    done += batch;
                }
                if (cfg.method == Method::Sade) sade_update_probabilities(sade, gen_record);
                break;
            }
            case Method::BoPi:
            case Method::BoEi:
            case Method::BoUcb: {
                if (x_unit.empty()) {
                    for (const auto& rec : drv.result.log) {
                        x_unit.push_back(to_unit(rec.params));
                        y_obs.push_back(rec.fitness);
                    }
                    model = gp_fit(x_unit, y_obs);
                    last_fit_obs = x_unit.size();
                }
                acq.t = drv.result.log.size() + 1;
                const auto next = bo_step(model, bounds, drv.best, acq, rng);
                const double fitness = objective(next);
                drv.record(next, fitness);
                x_unit.push_back(to_unit(next));
                y_obs.push_back(fitness);
                if (!drv.stopped) {
                    if (x_unit.size() - last_fit_obs >= cfg.gp_refit_interval) {
                        model = gp_fit(x_unit, y_obs, model.jitter());
                        last_fit_obs = x_unit.size();
                    } else {
                        model.refit_data(x_unit, y_obs);
                    }
                }
                break;
            }
        }
    }

    drv.result.best_fitness = drv.best;
    drv.result.evaluations = drv.result.log.size();
    return drv.result;
}

}  // namespace lgmd
