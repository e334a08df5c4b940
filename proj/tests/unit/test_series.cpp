#include "helpers.hpp"

#include "hdmd/error.hpp"
#include "hdmd/series.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace hdmd;

namespace {

MultivariateSeries row_series(std::vector<double> v, double dt = 0.1) {
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) m(0, static_cast<Eigen::Index>(j)) = v[j];
    return MultivariateSeries({"x"}, dt, m);
}

}  // namespace

TEST_CASE("series construction validates its invariants") {
    CHECK_THROWS_AS(MultivariateSeries({"a"}, 0.0, Eigen::MatrixXd::Zero(1, 3)), ValidationError);
    CHECK_THROWS_AS(MultivariateSeries({"a"}, -1.0, Eigen::MatrixXd::Zero(1, 3)), ValidationError);
    CHECK_THROWS_AS(MultivariateSeries({"a", "a"}, 0.1, Eigen::MatrixXd::Zero(2, 3)), ValidationError);
    CHECK_THROWS_AS(MultivariateSeries({"a"}, 0.1, Eigen::MatrixXd::Zero(2, 3)), ShapeError);
    CHECK_THROWS_AS(MultivariateSeries({"a"}, 0.1, Eigen::MatrixXd::Zero(1, 0)), ValidationError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(1, 3);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(MultivariateSeries({"a"}, 0.1, bad), ValidationError);

    const MultivariateSeries s({"a", "b"}, 0.5, Eigen::MatrixXd::Ones(2, 4), 10.0);
    CHECK(s.n_channels() == 2);
    CHECK(s.n_samples() == 4);
    CHECK(s.end_time() == doctest::Approx(11.5));
    CHECK(s.index_at(11.0) == 2);
    CHECK(s.index_at(11.0 + 1e-9) == 2);
    CHECK_THROWS_AS(s.index_at(11.2), ValidationError);
    CHECK_THROWS_AS(s.index_at(12.0), ValidationError);
    CHECK(s.channel_index("b") == 1u);
    CHECK_FALSE(s.channel_index("c"));
    const auto sl = s.slice(1, 2);
    CHECK(sl.t0() == doctest::Approx(10.5));
    CHECK(sl.n_samples() == 2);
    CHECK_THROWS_AS(s.slice(3, 2), ShapeError);
}

TEST_CASE("resample_uniform follows the piecewise-linear oracle") {
    SUBCASE("single segment") {
        const std::vector<double> t{0, 1}, v{0, 10};
        const auto r = resample_uniform(t, v, 0.5);
        REQUIRE(r.size() == 3);
        CHECK(r[0] == doctest::Approx(0));
        CHECK(r[1] == doctest::Approx(5));
        CHECK(r[2] == doctest::Approx(10));
    }
    SUBCASE("constant signal") {
        const std::vector<double> t{0, 0.1, 0.2}, v{1, 1, 1};
        const auto r = resample_uniform(t, v, 0.1);
        REQUIRE(r.size() == 3);
        for (double x : r) CHECK(x == 1.0);
    }
    SUBCASE("grid stops at the last point not beyond the data") {
        const std::vector<double> t{0, 2}, v{0, 4};
        const auto r = resample_uniform(t, v, 0.3);
        REQUIRE(r.size() == 7);
        for (std::size_t k = 0; k < r.size(); ++k) CHECK(r[k] == doctest::Approx(0.6 * static_cast<double>(k)).epsilon(1e-12));
    }
    SUBCASE("exact on affine signals with irregular stamps") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> step(0.5, 1.5);
        std::vector<double> t{0.0}, v;
        for (int k = 0; k < 200; ++k) t.push_back(t.back() + step(gen));
        for (double x : t) v.push_back(2.5 * x - 7.0);
        const auto r = resample_uniform(t, v, 0.1);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double tk = 0.1 * static_cast<double>(k);
            CHECK(std::abs(r[k] - (2.5 * tk - 7.0)) < 1e-12 * std::max(1.0, std::abs(2.5 * tk)));
        }
    }
    SUBCASE("never extrapolates") {
        const std::vector<double> t{0, 1}, v{0, 1};
        const std::vector<double> query{1.5};
        CHECK_THROWS_AS(interpolate_linear(t, v, query), ValidationError);
    }
    SUBCASE("rejects non-increasing stamps") {
        const std::vector<double> t{0, 1, 1}, v{0, 1, 2};
        CHECK_THROWS_AS(resample_uniform(t, v, 0.5), ValidationError);
    }
}

TEST_CASE("CSV ingestion") {
    SUBCASE("uniform file is loaded untouched") {
        std::ostringstream csv;
        csv << "time,a,b\n";
        std::mt19937_64 gen(1);
        std::normal_distribution<double> d;
        std::vector<double> a, b;
        for (int j = 0; j < 100; ++j) {
            a.push_back(d(gen));
            b.push_back(d(gen));
            csv.precision(17);
            csv << j / 10.0 << ',' << a.back() << ',' << b.back() << '\n';
        }
        const auto s = parse_csv(csv.str(), 0.1);
        REQUIRE(s.n_samples() == 100);
        REQUIRE(s.n_channels() == 2);
        CHECK(s.channels()[1] == "b");
        for (Eigen::Index j = 0; j < 100; ++j) {
            CHECK(s.values()(0, j) == a[static_cast<std::size_t>(j)]);
            CHECK(s.values()(1, j) == b[static_cast<std::size_t>(j)]);
        }
    }
    SUBCASE("jittered ~1 Hz stamps are interpolated to a 10x denser grid") {
        std::ostringstream csv;
        csv.precision(17);
        csv << "time,x\n";
        std::mt19937_64 gen(9);
        std::uniform_real_distribution<double> jitter(-0.1, 0.1);
        double t = 0.0;
        std::vector<double> ts, vs;
        for (int k = 0; k < 60; ++k) {
            ts.push_back(t);
            vs.push_back(std::sin(0.2 * t));
            csv << t << ',' << vs.back() << '\n';
            t += 1.0 + jitter(gen);
        }
        const auto s = parse_csv(csv.str(), 0.1);
        CHECK(s.n_samples() == static_cast<std::size_t>(std::floor((ts.back() - ts.front()) / 0.1 + 1e-9)) + 1);
        // Each grid value lies on the chord of its bracketing samples.
        for (std::size_t j = 0; j < s.n_samples(); ++j) {
            const double tj = s.time(j);
            std::size_t k = 0;
            while (k + 2 < ts.size() && ts[k + 1] < tj) ++k;
            const double w = (tj - ts[k]) / (ts[k + 1] - ts[k]);
            CHECK(s.values()(0, static_cast<Eigen::Index>(j)) ==
                  doctest::Approx(vs[k] + w * (vs[k + 1] - vs[k])).epsilon(1e-12));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(parse_csv("", 0.1), ValidationError);
        CHECK_THROWS_AS(parse_csv("time,a\n", 0.1), ValidationError);
        CHECK_THROWS_AS(parse_csv("time,a\n0,1\n0,2\n", 0.1), ValidationError);
        CHECK_THROWS_AS(parse_csv("time,a\n0,1\n0.1,2\n0.05,3\n", 0.1), ValidationError);
        try {
            parse_csv("time,a,b\n0,1,2\n0.1,1\n", 0.1);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
        try {
            parse_csv("time,a\n0,1\n0.1,abc\n", 0.1);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
        CHECK_THROWS_AS(parse_csv("t,a\n0,1\n", 0.1), ParseError);
    }
    SUBCASE("file round trip is exact") {
        std::mt19937_64 gen(5);
        const MultivariateSeries s({"u", "v", "w"}, 0.1, testing::random_matrix(3, 50, gen));
        const auto dir = testing::scratch_dir("csv");
        write_csv(s, dir / "s.csv");
        const auto back = load_csv(dir / "s.csv", 0.1);
        CHECK(back.channels() == s.channels());
        CHECK(back.values() == s.values());
        CHECK_THROWS_AS(load_csv(dir / "missing.csv", 0.1), ValidationError);
    }
}

TEST_CASE("z-score normalization") {
    SUBCASE("hand-computed channel") {
        const auto s = row_series({1, 2, 3});
        const auto st = zscore_fit(s);
        CHECK(st.mean(0) == doctest::Approx(2.0));
        CHECK(st.stddev(0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
        const auto z = zscore_apply(s, st).values();
        CHECK(z(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-12));
        CHECK(z(0, 1) == doctest::Approx(0.0));
        CHECK(z(0, 2) == doctest::Approx(1.224744871391589).epsilon(1e-12));
    }
    SUBCASE("standardized output and round trip") {
        std::mt19937_64 gen(11);
        Eigen::MatrixXd v = testing::random_matrix(5, 200, gen, 3.0);
        v.array().colwise() += Eigen::ArrayXd::LinSpaced(5, -10, 10);
        const MultivariateSeries s({"a", "b", "c", "d", "e"}, 0.1, v);
        const auto st = zscore_fit(s);
        const auto z = zscore_apply(s, st);
        for (Eigen::Index c = 0; c < 5; ++c) {
            const auto row = testing::to_rows(z.values())[static_cast<std::size_t>(c)];
            CHECK(std::abs(oracle::mean(row)) < 1e-12);
            CHECK(std::abs(oracle::pop_std(row) - 1.0) < 1e-12);
        }
        const auto back = zscore_invert(z, st);
        CHECK(((back.values() - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff()) < 1e-12);
        // Applying the statistics of already-standardized data is the identity.
        const auto again = zscore_apply(z, zscore_fit(z));
        CHECK((again.values() - z.values()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("constant channel is rejected by name, unless a fallback is configured") {
        Eigen::MatrixXd v(2, 4);
        v << 1, 2, 3, 4, 5, 5, 5, 5;
        const MultivariateSeries s({"moving", "stuck"}, 0.1, v);
        try {
            zscore_fit(s);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("stuck") != std::string::npos);
        }
        ZScoreOptions opt;
        opt.constant_channel_std = 1.0;
        const auto st = zscore_fit(s, opt);
        CHECK(st.stddev(1) == 1.0);
        CHECK(zscore_apply(s, st).values().row(1).cwiseAbs().maxCoeff() == 0.0);
    }
}
