#include "helpers.hpp"

#include "hdmd/error.hpp"
#include "hdmd/hankel.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/synth.hpp"

#include <doctest.h>

#include <numbers>

using namespace hdmd;

namespace {

MultivariateSeries sines(const std::vector<double>& freqs, const std::vector<double>& amps, std::size_t n,
                         double dt = 0.1, std::size_t channels = 1) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                v(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) +=
                    amps[k] * std::sin(2.0 * std::numbers::pi * freqs[k] * static_cast<double>(j) * dt + 0.7 * static_cast<double>(c + k));
            }
        }
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < channels; ++c) names.push_back("c" + std::to_string(c));
    return MultivariateSeries(names, dt, v);
}

std::vector<double> oscillation_frequencies(const DmdModel& model) {
    std::vector<double> out;
    for (const auto& w : continuous_eigenvalues(model).omega) {
        if (w.imag() > 1e-9) out.push_back(w.imag() / (2.0 * std::numbers::pi));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("sample conversions") {
    CHECK(samples_nearest(7.3143, 0.1) == 73);
    CHECK(samples_nearest(0.5 * 7.3143, 0.1) == 37);
    CHECK(samples_nearest(4.0 * 7.3143, 0.1) == 293);
    CHECK(samples_nearest(16.0 * 7.3143, 0.1) == 1170);
    CHECK(samples_floor(8.0 * 7.3143, 0.1) == 585);
    CHECK(samples_floor(4.0 * 7.3143, 0.1) == 292);
    CHECK(samples_floor(0.3, 0.1) == 3);  // 0.3 / 0.1 is 2.9999999999999996
}

TEST_CASE("config invariants") {
    CHECK(HdmdConfig{731, 411}.hankel_columns() == 319);
    CHECK(HdmdConfig{731, 411}.is_valid());
    CHECK_FALSE(HdmdConfig{10, 9}.is_valid());
    CHECK_FALSE(HdmdConfig{10, 8}.is_valid());  // one Hankel column cannot form two snapshot pairs
    CHECK(HdmdConfig{10, 7}.is_valid());
    CHECK_THROWS_AS(HdmdConfig({10, 9}).validate(), ShapeError);
    CHECK_THROWS_AS(HdmdConfig({1, 0}).validate(), ShapeError);
    const auto mid = HdmdConfig::from_seconds(10.0 * 7.3143, 0.5625 * 10.0 * 7.3143, 0.1);
    CHECK(mid.n_tr == 731);
    CHECK(mid.n_d == 411);
}

TEST_CASE("Hankel pair layout") {
    SUBCASE("direct enumeration on a scalar sequence") {
        Eigen::MatrixXd s(1, 5);
        s << 1, 2, 3, 4, 5;
        const auto pair = build_hankel_pair(s, 1, 1.0);
        Eigen::MatrixXd x(2, 3), xp(2, 3);
        x << 2, 3, 4, 1, 2, 3;
        xp << 3, 4, 5, 2, 3, 4;
        CHECK(pair.x == x);
        CHECK(pair.xp == xp);
    }
    SUBCASE("zero delay equals the plain snapshot pair") {
        const Eigen::MatrixXd s = Eigen::MatrixXd::Random(3, 10);
        const auto pair = build_hankel_pair(s, 0, 1.0);
        const auto plain = SnapshotPair::from_sequence(s, 1.0);
        CHECK(pair.x == plain.x);
        CHECK(pair.xp == plain.xp);
    }
    SUBCASE("midpoint configuration shape") {
        const auto pair = build_hankel_pair(Eigen::MatrixXd::Random(15, 731), 411, 0.1);
        CHECK(pair.x.rows() == 6180);
        CHECK(pair.x.cols() == 319);
    }
    SUBCASE("shape law, shift consistency and the definition oracle on random sizes") {
        std::mt19937_64 gen(17);
        std::uniform_int_distribution<int> pick_n(1, 4), pick_m(4, 40);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = pick_n(gen), m = pick_m(gen);
            std::uniform_int_distribution<int> pick_d(0, m - 2);
            const int d = pick_d(gen);
            const Eigen::MatrixXd s = testing::random_matrix(n, m, gen);
            const auto pair = build_hankel_pair(s, static_cast<std::size_t>(d), 0.1);
            CHECK(pair.x.rows() == n * (d + 1));
            CHECK(pair.x.cols() == m - 1 - d);
            for (Eigen::Index j = 0; j + 1 < pair.x.cols(); ++j) CHECK(pair.xp.col(j) == pair.x.col(j + 1));
            const auto ref = oracle::hankel(testing::to_rows(s), static_cast<std::size_t>(d), false);
            const auto ref_p = oracle::hankel(testing::to_rows(s), static_cast<std::size_t>(d), true);
            CHECK(testing::to_rows(pair.x) == ref);
            CHECK(testing::to_rows(pair.xp) == ref_p);
        }
    }
    SUBCASE("too few samples") {
        CHECK_THROWS_AS(build_hankel_pair(Eigen::MatrixXd::Random(2, 5), 4, 1.0), ShapeError);
    }
    SUBCASE("delay state stacks newest first") {
        Eigen::MatrixXd s(1, 5);
        s << 1, 2, 3, 4, 5;
        const Eigen::VectorXd v = delay_state(s, 2, 4);
        CHECK(v == Eigen::Vector3d(5, 4, 3));
    }
}

TEST_CASE("fitting and predicting") {
    SUBCASE("two-channel sinusoids give unit-circle eigenvalues") {
        const auto s = sines({0.125}, {1.0}, 2000, 0.1, 2);
        const auto f = fit_hdmd(s, HdmdConfig{640, 2}, s.time(1500));
        REQUIRE(f.model().rank() >= 2);
        for (Eigen::Index k = 0; k < 2; ++k) {
            CHECK(std::abs(f.model().eigenvalues()(k)) > 0.999);
            CHECK(std::abs(f.model().eigenvalues()(k)) < 1.001);
        }
        CHECK(f.model().state_dim() == 6);
    }
    SUBCASE("latent variables need delays") {
        const auto s = sines({0.10, 0.23}, {1.0, 0.6}, 3000);
        const auto plain = fit_hdmd(s, HdmdConfig{500, 0}, s.time(2000));
        CHECK(plain.model().rank() == 1);
        CHECK(oscillation_frequencies(plain.model()).size() <= 1);

        // Three delays span the four-dimensional latent state of the raw signal.
        const auto raw = fit_exact_dmd(build_hankel_pair(s.values().leftCols(500), 3, 0.1));
        CHECK(raw.rank() == 4);
        auto freqs = oscillation_frequencies(raw);
        REQUIRE(freqs.size() == 2);
        CHECK(std::abs(freqs[0] - 0.10) < 1e-6);
        CHECK(std::abs(freqs[1] - 0.23) < 1e-6);

        // The z-scored window carries a mean offset, one more (unit) eigenvalue.
        const auto delayed = fit_hdmd(s, HdmdConfig{500, 4}, s.time(2000));
        freqs = oscillation_frequencies(delayed.model());
        REQUIRE(freqs.size() == 2);
        CHECK(std::abs(freqs[0] - 0.10) < 1e-6);
        CHECK(std::abs(freqs[1] - 0.23) < 1e-6);
    }
    SUBCASE("latent two-tone forecast with 40 delays") {
        const auto s = sines({0.10, 0.23}, {1.0, 1.0}, 3000);
        const auto f = fit_hdmd(s, HdmdConfig{400, 40}, s.time(2000));
        const auto pred = predict(f, 20.0);  // two periods of the slower tone
        REQUIRE(pred.n_samples() == 200);
        CHECK(pred.t0() == doctest::Approx(s.time(2001)));
        const Eigen::MatrixXd truth = s.values().middleCols(2001, 200);
        CHECK((pred.values() - truth).cwiseAbs().maxCoeff() < 1e-3);
    }
    SUBCASE("single sinusoid forecast is near exact") {
        const auto s = sines({0.1367}, {2.0}, 3000);
        const auto f = fit_hdmd(s, HdmdConfig{300, 5}, s.time(1000));
        const auto pred = predict_steps(f, 73);
        const Eigen::MatrixXd truth = s.values().middleCols(1001, 73);
        CHECK(nrmse(pred.values(), truth).averaged < 1e-3);
    }
    SUBCASE("constant channels with the fallback predict the constant") {
        const MultivariateSeries s({"a", "b"}, 0.1, Eigen::MatrixXd::Constant(2, 200, 3.0));
        HdmdOptions opt;
        opt.zscore.constant_channel_std = 1.0;
        const auto f = fit_hdmd(s, HdmdConfig{100, 2}, s.time(150), opt);
        const auto pred = predict_steps(f, 20);
        CHECK((pred.values().array() - 3.0).abs().maxCoeff() < 1e-6);
        CHECK_THROWS_AS(fit_hdmd(s, HdmdConfig{100, 2}, s.time(150)), ValidationError);
    }
    SUBCASE("zero delay matches plain exact DMD on the z-scored window") {
        std::mt19937_64 gen(2);
        const MultivariateSeries s({"a", "b", "c"}, 0.1, testing::random_matrix(3, 300, gen));
        const auto f = fit_hdmd(s, HdmdConfig{100, 0}, s.time(250));
        const auto window = s.slice(151, 100);
        const auto z = zscore_apply(window, zscore_fit(window)).values();
        const auto model = fit_exact_dmd(SnapshotPair::from_sequence(z, 0.1)).initialized(z.col(99));
        const Eigen::MatrixXd direct = forecast(model, 15).states;
        CHECK((f.predict_normalized(15) - direct).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("forecast continuity on a noiseless linear system") {
        SynthSpec spec;
        spec.kind = SynthKind::linear_lti;
        spec.frequencies_hz = {0.05, 0.12};
        spec.damping = {0.01, 0.02};
        spec.dimension = 4;
        spec.duration = 100.0;
        const auto s = generate(spec).series;
        const auto f = fit_hdmd(s, HdmdConfig{400, 2}, s.time(499));
        const auto pred = predict_steps(f, 1);
        std::vector<double> steps;
        for (Eigen::Index j = 100; j < 500; ++j) steps.push_back((s.values().col(j) - s.values().col(j - 1)).norm());
        const double p95 = oracle::quantile(steps, 0.95);
        CHECK((pred.values().col(0) - s.values().col(499)).norm() < p95);
        CHECK((pred.values().col(0) - s.values().col(500)).norm() < 1e-6);
    }
    SUBCASE("window errors") {
        const auto s = sines({0.1}, {1.0}, 100);
        CHECK_THROWS_AS(fit_hdmd(s, HdmdConfig{50, 2}, s.time(20)), ValidationError);
        CHECK_THROWS_AS(fit_hdmd(s, HdmdConfig{50, 2}, 3.14159), ValidationError);
        CHECK_THROWS_AS(fit_hdmd(s, HdmdConfig{10, 9}, s.time(50)), ShapeError);
        const auto f = fit_hdmd(s, HdmdConfig{50, 2}, s.time(60));
        CHECK_THROWS_AS(predict(f, 0.01), ValidationError);
    }
}
