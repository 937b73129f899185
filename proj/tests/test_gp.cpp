#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lgmd/errors.hpp"
#include "lgmd/gp.hpp"
#include "lgmd/rng.hpp"

using namespace lgmd;

TEST_CASE("matern at zero distance returns the amplitude") {
    std::vector<double> x{0.3, 0.7};
    std::vector<double> ls{0.5, 0.5};
    CHECK(matern52(x, x, 2.5, ls) == doctest::Approx(2.5));
}

TEST_CASE("matern at unit scaled distance") {
    // r^2 = 1, theta = 1: (1 + sqrt5 + 5/3) exp(-sqrt5)
    std::vector<double> a{0.0}, b{1.0}, ls{1.0};
    const double expected = (1.0 + std::sqrt(5.0) + 5.0 / 3.0) * std::exp(-std::sqrt(5.0));
    CHECK(matern52(a, b, 1.0, ls) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(0.52399).epsilon(1e-4));
}

TEST_CASE("matern vanishes at long range and is symmetric") {
    std::vector<double> a{0.0, 0.0}, b{400.0, 300.0}, ls{0.5, 2.0};
    CHECK(matern52(a, b, 1.0, ls) < 1e-12);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x{rng.uniform(), rng.uniform()};
        std::vector<double> y{rng.uniform(), rng.uniform()};
        CHECK(matern52(x, y, 1.7, ls) == doctest::Approx(matern52(y, x, 1.7, ls)));
    }
}

namespace {

GpModel fit_1d(const std::vector<double>& xs, const std::vector<double>& ys,
               double jitter = 1e-6) {
    std::vector<std::vector<double>> x;
    for (double v : xs) x.push_back({v});
    return gp_fit(x, ys, jitter);
}

}  // namespace

TEST_CASE("posterior interpolates the observations") {
    const std::vector<double> xs{0.05, 0.3, 0.55, 0.8, 0.95};
    std::vector<double> ys;
    for (double v : xs) ys.push_back(std::sin(6.0 * v));
    const auto model = fit_1d(xs, ys);
    for (size_t i = 0; i < xs.size(); ++i) {
        std::vector<double> q{xs[i]};
        CHECK(std::abs(model.predict(q).mean - ys[i]) < 1e-3);
    }
}

TEST_CASE("posterior variance shrinks near observations") {
    const std::vector<double> xs{0.2, 0.8};
    const std::vector<double> ys{0.0, 1.0};
    const auto model = fit_1d(xs, ys);
    std::vector<double> at{0.2}, far{0.5};
    CHECK(model.predict(at).sd < model.predict(far).sd);
}

TEST_CASE("constant targets give a constant posterior below the prior") {
    const std::vector<double> xs{0.1, 0.4, 0.9};
    const std::vector<double> ys{3.0, 3.0, 3.0};
    const auto model = fit_1d(xs, ys);
    for (double q : {0.0, 0.25, 0.5, 0.99}) {
        std::vector<double> x{q};
        const auto post = model.predict(x);
        CHECK(post.mean == doctest::Approx(3.0).epsilon(1e-6));
        const double prior_sd = model.length_scales().empty() ? 0.0 : std::sqrt(model.theta());
        CHECK(post.sd <= prior_sd + 1e-12);
    }
}

TEST_CASE("duplicate inputs with different targets are jitter-absorbed") {
    std::vector<std::vector<double>> x{{0.5}, {0.5}};
    std::vector<double> y{0.0, 2.0};
    const auto model = gp_fit(x, y);
    std::vector<double> q{0.5};
    CHECK(model.predict(q).mean == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit requires two observations") {
    std::vector<std::vector<double>> x{{0.5}};
    std::vector<double> y{1.0};
    CHECK_THROWS_AS(gp_fit(x, y), ConfigError);
}

TEST_CASE("acquisition identities") {
    AcquisitionConfig cfg;
    cfg.zeta = 0.1;

    cfg.kind = AcquisitionKind::Ei;
    CHECK(acquisition_value(5.0, 0.0, 1.0, cfg) == 0.0);
    CHECK(acquisition_value(0.0, 1.0, 0.0, cfg) > 0.0);

    cfg.kind = AcquisitionKind::Pi;
    CHECK(acquisition_value(1.0 + cfg.zeta, 1.0, 1.0, cfg) == doctest::Approx(0.5));

    cfg.kind = AcquisitionKind::UcbFixed;
    cfg.kappa = 0.0;
    CHECK(acquisition_value(2.0, 3.0, 0.0, cfg) == doctest::Approx(2.0));
    cfg.kappa = 2.576;
    CHECK(acquisition_value(2.0, 3.0, 0.0, cfg) == doctest::Approx(2.0 + 2.576 * 3.0));
}

TEST_CASE("scheduled UCB grows with the iteration counter") {
    AcquisitionConfig cfg;
    cfg.kind = AcquisitionKind::UcbScheduled;
    cfg.nu = 1.0;
    cfg.delta = 0.1;
    cfg.dim = 3;
    cfg.t = 1;
    const double early = acquisition_value(0.0, 1.0, 0.0, cfg);
    cfg.t = 100;
    const double late = acquisition_value(0.0, 1.0, 0.0, cfg);
    CHECK(late > early);
    CHECK(early > 0.0);
}

TEST_CASE("EI is non-negative and PI lies in the unit interval") {
    const std::vector<double> xs{0.1, 0.35, 0.6, 0.92};
    const std::vector<double> ys{0.4, -1.0, 2.2, 0.3};
    const auto model = fit_1d(xs, ys);
    Rng rng(17);
    AcquisitionConfig cfg;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> q{rng.uniform()};
        const auto post = model.predict(q);
        cfg.kind = AcquisitionKind::Ei;
        CHECK(acquisition_value(post.mean, post.sd, 2.2, cfg) >= 0.0);
        cfg.kind = AcquisitionKind::Pi;
        const double pi = acquisition_value(post.mean, post.sd, 2.2, cfg);
        CHECK(pi >= 0.0);
        CHECK(pi <= 1.0);
    }
}

TEST_CASE("posterior sd at observations stays at the jitter scale") {
    const std::vector<double> xs{0.15, 0.5, 0.85};
    const std::vector<double> ys{1.0, -0.5, 0.25};
    const auto model = fit_1d(xs, ys);
    for (double v : xs) {
        std::vector<double> q{v};
        CHECK(model.predict(q).sd < 0.05 * std::sqrt(model.theta()) + 1e-6);
    }
}
