#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lgmd {

// Matern-5/2 with per-dimension (ARD) length scales:
//   k = theta * (1 + s + 5/3 r^2) * exp(-s),  s = sqrt(5 r^2),
//   r^2 = sum_d (x_i,d - x_j,d)^2 / l_d^2.
double matern52(std::span<const double> xi, std::span<const double> xj, double theta,
                std::span<const double> length_scales);

// Gaussian-process surrogate over the unit cube. Outputs are standardised
// internally; predictions are returned in the original output scale.
class GpModel {
public:
    struct Posterior {
        double mean = 0.0;
        double sd = 0.0;
    };

    Posterior predict(std::span<const double> x_unit) const;

    size_t observations() const { return n_; }
    size_t dim() const { return d_; }
    double theta() const { return theta_; }
    const std::vector<double>& length_scales() const { return length_scales_; }
    double jitter() const { return jitter_; }

    // Recompute the factorisation for new data with the current
    // hyper-parameters (used between full refits during a campaign).
    void refit_data(const std::vector<std::vector<double>>& x_unit, std::span<const double> y);

private:
    friend GpModel gp_fit(const std::vector<std::vector<double>>& x_unit,
                          std::span<const double> y, double jitter);

    void factorise();
    double log_marginal_likelihood() const;

    size_t n_ = 0, d_ = 0;
    std::vector<double> x_;  // n*d, row-major, unit cube
    std::vector<double> y_std_;
    double y_mean_ = 0.0, y_sd_ = 1.0;
    double theta_ = 1.0;
    std::vector<double> length_scales_;
    double jitter_ = 1e-6;
    std::vector<double> chol_;   // lower-triangular factor of K + jitter*I
    std::vector<double> alpha_;  // (K + jitter*I)^-1 y_std
    double lml_ = 0.0;
};

// Fit hyper-parameters (amplitude + ARD length scales) by maximising the log
// marginal likelihood with a 16-start coordinate search over log-parameters,
// 100 iterations per start. The jitter escalates tenfold up to 1e-4 when the
// factorisation fails; beyond that IllConditioned is thrown.
GpModel gp_fit(const std::vector<std::vector<double>>& x_unit, std::span<const double> y,
               double jitter = 1e-6);

enum class AcquisitionKind : uint8_t { Pi, Ei, UcbFixed, UcbScheduled };

struct AcquisitionConfig {
    AcquisitionKind kind = AcquisitionKind::Ei;
    double zeta = 0.01;   // PI/EI trade-off
    double kappa = 2.576; // fixed UCB
    double nu = 1.0;      // scheduled UCB
    double delta = 0.1;   // scheduled UCB, in (0,1)
    size_t t = 1;         // iteration counter (scheduled UCB)
    size_t dim = 1;
};

// Acquisition value from a posterior (mu, sigma) against the incumbent.
double acquisition_value(double mu, double sigma, double best_f, const AcquisitionConfig& cfg);

}  // namespace lgmd
