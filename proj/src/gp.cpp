#include "lgmd/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgmd/errors.hpp"
#include "lgmd/rng.hpp"

namespace lgmd {

double matern52(std::span<const double> xi, std::span<const double> xj, double theta,
                std::span<const double> length_scales) {
    double r2 = 0.0;
    for (size_t d = 0; d < xi.size(); ++d) {
        const double diff = (xi[d] - xj[d]) / length_scales[d];
        r2 += diff * diff;
    }
    const double s = std::sqrt(5.0 * r2);
    return theta * (1.0 + s + (5.0 / 3.0) * r2) * std::exp(-s);
}

namespace {

// In-place Cholesky of a symmetric matrix stored row-major; returns false if
// a pivot is not positive.
bool cholesky(std::vector<double>& a, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (sum <= 0.0) return false;
                a[i * n + i] = std::sqrt(sum);
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
        for (size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
    }
    return true;
}

void solve_lower(const std::vector<double>& l, size_t n, std::vector<double>& b) {
    for (size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (size_t k = 0; k < i; ++k) sum -= l[i * n + k] * b[k];
        b[i] = sum / l[i * n + i];
    }
}

void solve_upper_t(const std::vector<double>& l, size_t n, std::vector<double>& b) {
    for (size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (size_t k = i + 1; k < n; ++k) sum -= l[k * n + i] * b[k];
        b[i] = sum / l[i * n + i];
    }
}

}  // namespace

void GpModel::factorise() {
    double jitter = jitter_;
    while (true) {
        chol_.assign(n_ * n_, 0.0);
        for (size_t i = 0; i < n_; ++i) {
            std::span<const double> xi(&x_[i * d_], d_);
            for (size_t j = 0; j <= i; ++j) {
                std::span<const double> xj(&x_[j * d_], d_);
                double k = matern52(xi, xj, theta_, length_scales_);
                if (i == j) k += jitter * theta_;
                chol_[i * n_ + j] = k;
                chol_[j * n_ + i] = k;
            }
        }
        if (cholesky(chol_, n_)) break;
        jitter *= 10.0;
        if (jitter > 1e-4) throw IllConditioned("kernel matrix not positive definite at max jitter");
    }
    jitter_ = jitter;

    alpha_ = y_std_;
    solve_lower(chol_, n_, alpha_);
    double log_det = 0.0;
    for (size_t i = 0; i < n_; ++i) log_det += std::log(chol_[i * n_ + i]);
    double quad = 0.0;
    for (size_t i = 0; i < n_; ++i) quad += alpha_[i] * alpha_[i];
    solve_upper_t(chol_, n_, alpha_);
    lml_ = -0.5 * quad - log_det - 0.5 * static_cast<double>(n_) * std::log(2.0 * M_PI);
}

double GpModel::log_marginal_likelihood() const { return lml_; }

GpModel::Posterior GpModel::predict(std::span<const double> x_unit) const {
    std::vector<double> k_star(n_);
    for (size_t i = 0; i < n_; ++i) {
        std::span<const double> xi(&x_[i * d_], d_);
        k_star[i] = matern52(xi, x_unit, theta_, length_scales_);
    }
    double mean_std = 0.0;
    for (size_t i = 0; i < n_; ++i) mean_std += k_star[i] * alpha_[i];

    std::vector<double> v = k_star;
    solve_lower(chol_, n_, v);
    double vv = 0.0;
    for (size_t i = 0; i < n_; ++i) vv += v[i] * v[i];
    const double var_std = std::max(theta_ - vv, 0.0);

    Posterior post;
    post.mean = y_mean_ + y_sd_ * mean_std;
    post.sd = y_sd_ * std::sqrt(var_std);
    return post;
}

void GpModel::refit_data(const std::vector<std::vector<double>>& x_unit,
                         std::span<const double> y) {
    n_ = x_unit.size();
    x_.resize(n_ * d_);
    for (size_t i = 0; i < n_; ++i) std::copy(x_unit[i].begin(), x_unit[i].end(), &x_[i * d_]);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size());
    y_mean_ = mean;
    y_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;
    y_std_.resize(y.size());
    for (size_t i = 0; i < y.size(); ++i) y_std_[i] = (y[i] - y_mean_) / y_sd_;
    factorise();
}

GpModel gp_fit(const std::vector<std::vector<double>>& x_unit, std::span<const double> y,
               double jitter) {
    if (x_unit.size() < 2) throw ConfigError("gp_fit requires at least two observations");
    GpModel model;
    model.d_ = x_unit.front().size();
    model.jitter_ = jitter;
    model.length_scales_.assign(model.d_, 0.5);
    model.refit_data(x_unit, y);

    // Coordinate search over log-parameters: [log theta, log l_1..log l_d].
    const size_t n_params = 1 + model.d_;
    const double lo_theta = std::log(1e-3), hi_theta = std::log(1e3);
    const double lo_ls = std::log(1e-2), hi_ls = std::log(10.0);

    auto evaluate = [&](const std::vector<double>& log_params, double base_jitter) {
        GpModel trial = model;
        trial.jitter_ = base_jitter;
        trial.theta_ = std::exp(log_params[0]);
        for (size_t d = 0; d < trial.d_; ++d) trial.length_scales_[d] = std::exp(log_params[d + 1]);
        try {
            trial.factorise();
        } catch (const IllConditioned&) {
            return std::pair<double, GpModel>(-std::numeric_limits<double>::infinity(),
                                              std::move(trial));
        }
        return std::pair<double, GpModel>(trial.log_marginal_likelihood(), std::move(trial));
    };

    Rng rng(0x67500a1ull ^ (x_unit.size() * 0x9e3779b97f4a7c15ull));
    double best_lml = -std::numeric_limits<double>::infinity();
    GpModel best = model;
    constexpr int kStarts = 16;
    constexpr int kIterations = 100;
    for (int start = 0; start < kStarts; ++start) {
        std::vector<double> p(n_params);
        if (start == 0) {
            p[0] = 0.0;  // theta = 1
            for (size_t d = 1; d < n_params; ++d) p[d] = std::log(0.5);
        } else {
            p[0] = rng.uniform(lo_theta, hi_theta);
            for (size_t d = 1; d < n_params; ++d) p[d] = rng.uniform(lo_ls, hi_ls);
        }
        auto [cur_lml, cur_model] = evaluate(p, jitter);

        double step = 0.8;
        for (int it = 0; it < kIterations && step > 1e-3; ++it) {
            bool improved = false;
            for (size_t d = 0; d < n_params; ++d) {
                const double lo = d == 0 ? lo_theta : lo_ls;
                const double hi = d == 0 ? hi_theta : hi_ls;
                for (double dir : {+1.0, -1.0}) {
                    std::vector<double> q = p;
                    q[d] = std::clamp(q[d] + dir * step, lo, hi);
                    if (q[d] == p[d]) continue;
                    auto [lml, m] = evaluate(q, jitter);
                    if (lml > cur_lml) {
                        cur_lml = lml;
                        cur_model = std::move(m);
                        p = std::move(q);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (cur_lml > best_lml) {
            best_lml = cur_lml;
            best = std::move(cur_model);
        }
    }
    if (!std::isfinite(best_lml)) {
        // Every hyper-parameter choice failed to factorise.
        throw IllConditioned("kernel matrix not positive definite at max jitter");
    }
    return best;
}

double acquisition_value(double mu, double sigma, double best_f, const AcquisitionConfig& cfg) {
    auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    switch (cfg.kind) {
        case AcquisitionKind::Pi: {
            const double gain = mu - best_f - cfg.zeta;
            if (sigma <= 0.0) return gain > 0.0 ? 1.0 : 0.0;
            return cdf(gain / sigma);
        }
        case AcquisitionKind::Ei: {
            if (sigma <= 0.0) return 0.0;
            const double gain = mu - best_f - cfg.zeta;
            const double z = gain / sigma;
            return gain * cdf(z) + sigma * phi(z);
        }
        case AcquisitionKind::UcbFixed: return mu + cfg.kappa * sigma;
        case AcquisitionKind::UcbScheduled: {
            const double t = static_cast<double>(std::max<size_t>(cfg.t, 1));
            const double d = static_cast<double>(cfg.dim);
            const double tau =
                2.0 * ((d / 2.0 + 2.0) * std::log(t) + std::log(M_PI * M_PI / (3.0 * cfg.delta)));
            return mu + std::sqrt(std::max(cfg.nu * tau, 0.0)) * sigma;
        }
    }
    return 0.0;
}

}  // namespace lgmd
