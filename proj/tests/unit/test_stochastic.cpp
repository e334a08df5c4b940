#include "helpers.hpp"

#include "hdmd/error.hpp"
#include "hdmd/stochastic.hpp"

#include <doctest.h>

#include <numbers>

using namespace hdmd;

namespace {

MultivariateSeries tone(double f, std::size_t n, double dt = 0.1, double noise = 0.0, std::uint64_t seed = 3) {
    SeededRng rng(seed);
    Eigen::MatrixXd v(2, static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * dt;
        v(0, static_cast<Eigen::Index>(j)) = std::sin(2.0 * std::numbers::pi * f * t) + noise * rng.normal();
        v(1, static_cast<Eigen::Index>(j)) = 0.5 * std::cos(2.0 * std::numbers::pi * f * t + 0.3) + noise * rng.normal();
    }
    return MultivariateSeries({"a", "b"}, dt, v);
}

}  // namespace

TEST_CASE("configuration validation") {
    ShdmdConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_realizations = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.ltr_lo = 5.0;
    c.ltr_hi = 4.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.ld_hi_ratio = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.coverage = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("hyperparameter draws") {
    SUBCASE("degenerate ranges pin the draw") {
        ShdmdConfig c;
        c.ltr_lo = c.ltr_hi = 8.0;
        c.ld_lo_ratio = c.ld_hi_ratio = 0.5;
        SeededRng rng(1);
        const auto p = sample_hyperparams(rng, c, 7.3143, 0.1);
        CHECK(p.n_tr == 585);
        CHECK(p.n_d == 292);
    }
    SUBCASE("ten thousand draws stay inside the bounds") {
        ShdmdConfig c;
        SeededRng rng(99);
        const double t_ref = 7.3143, dt = 0.1;
        const auto tr_lo = samples_floor(4.0 * t_ref, dt), tr_hi = samples_floor(16.0 * t_ref, dt);
        for (int i = 0; i < 10000; ++i) {
            const auto p = sample_hyperparams(rng, c, t_ref, dt);
            CHECK(p.n_tr >= tr_lo);
            CHECK(p.n_tr <= tr_hi);
            CHECK(p.n_d >= samples_floor(0.125 * p.l_tr, dt));
            CHECK(p.n_d <= p.n_tr);
            CHECK(p.n_tr - 1 > p.n_d);
            CHECK(p.l_d <= p.l_tr);
        }
    }
    SUBCASE("same seed, same draws") {
        ShdmdConfig c;
        SeededRng a(5), b(5);
        for (int i = 0; i < 50; ++i) {
            const auto p = sample_hyperparams(a, c, 7.3, 0.1);
            const auto q = sample_hyperparams(b, c, 7.3, 0.1);
            CHECK(p.n_tr == q.n_tr);
            CHECK(p.n_d == q.n_d);
        }
    }
    SUBCASE("retries exhausted") {
        ShdmdConfig c;
        c.ltr_lo = c.ltr_hi = 0.2;
        c.ld_lo_ratio = c.ld_hi_ratio = 1.0;
        c.max_retries = 3;
        SeededRng rng(1);
        CHECK_THROWS_AS(sample_hyperparams(rng, c, 1.0, 0.1), ValidationError);
    }
}

TEST_CASE("band construction") {
    Eigen::MatrixXd mean(1, 2), sd(1, 2);
    mean << 1.0, -1.0;
    sd << 0.5, 0.0;
    const auto band = chebyshev_band(mean, sd, 2.0);
    CHECK(band.lower(0, 0) == 0.0);
    CHECK(band.upper(0, 0) == 2.0);
    CHECK(band.lower(0, 1) == -1.0);
    CHECK(band.upper(0, 1) == -1.0);
    CHECK_THROWS_AS(chebyshev_band(mean, sd, 0.0), ValidationError);
    CHECK_THROWS_AS(chebyshev_band(mean, Eigen::MatrixXd::Zero(2, 2), 1.0), ShapeError);
}

TEST_CASE("ensemble forecasts") {
    const double f = 0.125, t_ref = 8.0;
    SUBCASE("a single realization has zero spread") {
        const auto s = tone(f, 3000);
        ShdmdConfig c;
        c.n_realizations = 1;
        const auto out = shdmd_forecast(s, c, t_ref, s.time(2000), t_ref);
        CHECK(out.ensemble_size() == 1);
        CHECK(out.stddev.maxCoeff() == 0.0);
        CHECK(out.band.lower == out.mean.values());
        CHECK(out.mean.t0() == doctest::Approx(s.time(2001)));
        CHECK(out.mean.n_samples() == 80);
    }
    SUBCASE("noiseless sinusoid: members agree") {
        const auto s = tone(f, 3000);
        ShdmdConfig c;
        c.n_realizations = 20;
        const auto out = shdmd_forecast(s, c, t_ref, s.time(2500), 2.0 * t_ref);
        CHECK(out.stddev.maxCoeff() < 1e-3);
        const Eigen::MatrixXd truth = s.values().middleCols(2501, 160);
        CHECK((out.mean.values() - truth).cwiseAbs().maxCoeff() < 1e-3);
    }
    SUBCASE("noisy signal: coverage and determinism") {
        const auto s = tone(f, 3000, 0.1, 0.3, 11);
        ShdmdConfig c;
        c.n_realizations = 30;
        c.seed = 42;
        const auto a = shdmd_forecast(s, c, t_ref, s.time(2500), t_ref);
        c.workers = 1;
        const auto b = shdmd_forecast(s, c, t_ref, s.time(2500), t_ref);
        CHECK(a.mean.values() == b.mean.values());
        CHECK(a.stddev == b.stddev);
        const auto cov = ensemble_coverage(a, 2.0);
        CHECK(cov.minCoeff() >= 0.75);
        CHECK((a.band.upper.array() >= a.band.lower.array()).all());
    }
    SUBCASE("draws with an invalid window are dropped and logged") {
        const auto s = tone(f, 3000);
        ShdmdConfig c;
        c.n_realizations = 40;
        c.ltr_lo = c.ltr_hi = 4.0;
        c.ld_lo_ratio = 0.96;
        c.ld_hi_ratio = 1.0;
        const auto out = shdmd_forecast(s, c, t_ref, s.time(2000), t_ref);
        std::size_t invalid = 0;
        for (const auto& r : out.realizations) {
            if (r.ok) continue;
            ++invalid;
            CHECK(r.error.find("invalid Hankel configuration") != std::string::npos);
            CHECK(r.params.n_d + 3 > r.params.n_tr);
        }
        CHECK(invalid > 0);
        CHECK(out.ensemble_size() + invalid == 40);
    }
    SUBCASE("window does not fit") {
        const auto s = tone(f, 3000);
        CHECK_THROWS_AS(shdmd_forecast(s, ShdmdConfig{}, t_ref, s.time(100), t_ref), ValidationError);
    }
    SUBCASE("mostly failing realizations abort") {
        // A constant channel fails every fit when no fallback is configured.
        Eigen::MatrixXd v = tone(f, 3000).values();
        v.row(1).setConstant(2.0);
        const MultivariateSeries s({"a", "flat"}, 0.1, v);
        ShdmdConfig c;
        c.n_realizations = 5;
        CHECK_THROWS_AS(shdmd_forecast(s, c, t_ref, s.time(2500), t_ref), Error);
    }
}
