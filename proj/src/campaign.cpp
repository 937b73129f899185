#include "lgmd/campaign.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lgmd/errors.hpp"
#include "lgmd/objective.hpp"

namespace lgmd {

NetworkObjective::NetworkObjective(NetworkConfig config, const EventStream& stream,
                                   LabelTrack labels)
    : config_(std::move(config)), labels_(std::move(labels)) {
    if (stream.width != config_.topology.width || stream.height != config_.topology.height) {
        stream_ = pool_to_grid(stream, config_.topology.width, config_.topology.height);
    } else {
        stream_ = stream;
    }
}

FitnessReport NetworkObjective::report_for(std::span<const double> flat) const {
    return report_for(ParamVector::from_flat(flat, config_.variant));
}

FitnessReport NetworkObjective::report_for(const ParamVector& params) const {
    Network net(params, config_.topology, config_.variant, config_.neuron, config_.clamp_c);
    const SimResult sim = net.simulate(stream_);
    return evaluate(sim, labels_, config_.detector, config_.score);
}

double NetworkObjective::operator()(std::span<const double> flat) const {
    return report_for(flat).f_acc;
}

CampaignRun run_network_campaign(const NetworkObjective& objective, const CampaignConfig& config) {
    CampaignRun run;
    run.seed = config.seed;
    const Bounds bounds = Bounds::for_variant(objective.config().variant);
    run.campaign = run_campaign(
        config, [&](std::span<const double> flat) { return objective(flat); }, bounds);
    run.best_report = objective.report_for(run.campaign.best_params);
    return run;
}

double MethodSamples::mean(const std::vector<double>& v) const {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

CompareResult compare_methods(const NetworkObjective& objective, const CampaignConfig& base,
                              const std::vector<Method>& methods, size_t n_runs) {
    if (methods.size() < 2) throw ConfigError("compare needs at least two methods");
    if (n_runs < 2) throw ConfigError("compare needs at least two runs per method");

    CompareResult result;
    for (Method method : methods) {
        MethodSamples samples;
        samples.method = method;
        for (size_t r = 0; r < n_runs; ++r) {
            CampaignConfig cfg = base;
            cfg.method = method;
            cfg.seed = base.seed + r;
            const CampaignRun run = run_network_campaign(objective, cfg);
            samples.fit.push_back(run.campaign.best_fitness);
            samples.eva.push_back(static_cast<double>(run.campaign.evaluations));
            samples.acc.push_back(run.best_report.metrics.acc);
            samples.sen.push_back(run.best_report.metrics.sen);
            samples.pre.push_back(run.best_report.metrics.pre);
            samples.spe.push_back(run.best_report.metrics.spe);
        }
        result.methods.push_back(std::move(samples));
    }

    auto metric_of = [](const MethodSamples& s, const std::string& name)
        -> const std::vector<double>& {
        if (name == "Fit") return s.fit;
        if (name == "Eva") return s.eva;
        if (name == "Acc") return s.acc;
        if (name == "Sen") return s.sen;
        if (name == "Pre") return s.pre;
        return s.spe;
    };

    for (size_t a = 0; a < result.methods.size(); ++a) {
        for (size_t b = 0; b < result.methods.size(); ++b) {
            if (a == b) continue;
            for (const char* metric : kCompareMetrics) {
                PairwiseSignificance sig;
                sig.first = result.methods[a].method;
                sig.second = result.methods[b].method;
                sig.metric = metric;
                const auto mwu = mann_whitney_u(metric_of(result.methods[a], metric),
                                                metric_of(result.methods[b], metric));
                sig.u = mwu.u;
                sig.p = mwu.p_two_sided;
                sig.significant = mwu.p_two_sided <= kSignificanceLevel;
                result.pairwise.push_back(std::move(sig));
            }
        }
    }
    return result;
}

std::string compare_table_csv(const CompareResult& result) {
    std::ostringstream out;
    out << "Meth,Fit,Eva,Acc,Sen,Pre,Spe\n";
    for (const auto& s : result.methods) {
        out << method_name(s.method) << ',' << format_double(s.mean(s.fit)) << ','
            << format_double(s.mean(s.eva)) << ',' << format_double(s.mean(s.acc)) << ','
            << format_double(s.mean(s.sen)) << ',' << format_double(s.mean(s.pre)) << ','
            << format_double(s.mean(s.spe)) << '\n';
    }
    return out.str();
}

std::string compare_runs_csv(const CompareResult& result) {
    std::ostringstream out;
    out << "method,run,Fit,Eva,Acc,Sen,Pre,Spe\n";
    for (const auto& s : result.methods) {
        for (size_t r = 0; r < s.fit.size(); ++r) {
            out << method_name(s.method) << ',' << r << ',' << format_double(s.fit[r]) << ','
                << format_double(s.eva[r]) << ',' << format_double(s.acc[r]) << ','
                << format_double(s.sen[r]) << ',' << format_double(s.pre[r]) << ','
                << format_double(s.spe[r]) << '\n';
        }
    }
    return out.str();
}

std::string compare_significance_csv(const CompareResult& result) {
    std::ostringstream out;
    out << "first,second,metric,U,p,marker\n";
    for (const auto& sig : result.pairwise) {
        out << method_name(sig.first) << ',' << method_name(sig.second) << ',' << sig.metric << ','
            << format_double(sig.u) << ',' << format_double(sig.p) << ','
            << (sig.significant ? '+' : '.') << '\n';
    }
    return out.str();
}

std::vector<ClampRow> clamp_sweep(const NetworkConfig& config, const EventStream& stream,
                                  const LabelTrack& labels, std::vector<double> c_values,
                                  bool* deduplicated) {
    if (!variant_plastic(config.variant))
        throw ConfigError("clamp sweep requires a plastic variant (P or AP)");
    for (double c : c_values) {
        if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("clamp value outside [0,1]");
    }
    const size_t before = c_values.size();
    std::sort(c_values.begin(), c_values.end());
    c_values.erase(std::unique(c_values.begin(), c_values.end()), c_values.end());
    if (deduplicated) *deduplicated = c_values.size() != before;

    std::vector<ClampRow> rows;
    for (double c : c_values) {
        NetworkConfig cfg = config;
        cfg.clamp_c = c;
        NetworkObjective objective(cfg, stream, labels);
        ClampRow row;
        row.c = c;
        row.metrics = objective.report_for(cfg.params).metrics;
        rows.push_back(row);
    }
    return rows;
}

std::string clamp_sweep_csv(const std::vector<ClampRow>& rows) {
    std::ostringstream out;
    out << "c,acc,sen,pre,spe\n";
    for (const auto& row : rows) {
        out << format_double(row.c) << ',' << format_double(row.metrics.acc) << ','
            << format_double(row.metrics.sen) << ',' << format_double(row.metrics.pre) << ','
            << format_double(row.metrics.spe) << '\n';
    }
    return out.str();
}

}  // namespace lgmd
