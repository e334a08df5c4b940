#include "hdmd/hankel.hpp"

#include "hdmd/error.hpp"

#include <cmath>
#include <sstream>

namespace hdmd {

using Eigen::Index;

namespace {

double checked_ratio(double seconds, double dt) {
    if (!(dt > 0.0)) throw ValidationError("sample interval must be positive");
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
        throw ValidationError("duration must be finite and non-negative");
    }
    return seconds / dt;
}

}  // namespace

std::size_t samples_nearest(double seconds, double dt) {
    return static_cast<std::size_t>(std::llround(checked_ratio(seconds, dt)));
}

std::size_t samples_floor(double seconds, double dt) {
    // The epsilon keeps exact multiples such as 0.3 / 0.1 from flooring down.
    return static_cast<std::size_t>(std::floor(checked_ratio(seconds, dt) + 1e-9));
}

std::size_t HdmdConfig::hankel_columns() const noexcept {
    return n_tr >= n_d + 2 ? n_tr - 1 - n_d : 0;
}

// Exact DMD needs two snapshot pairs, so a single Hankel column is not enough.
bool HdmdConfig::is_valid() const noexcept { return hankel_columns() >= 2; }

void HdmdConfig::validate() const {
    if (!is_valid()) {
        std::ostringstream msg;
        msg << "invalid Hankel configuration n_tr = " << n_tr << ", n_d = " << n_d
            << ": n_tr - 1 - n_d must be at least 2 (need n_tr >= " << n_d + 3 << ")";
        throw ShapeError(msg.str());
    }
}

HdmdConfig HdmdConfig::from_seconds(double l_tr, double l_d, double dt, RankPolicy policy) {
    return HdmdConfig{samples_nearest(l_tr, dt), samples_nearest(l_d, dt), policy};
}

SnapshotPair build_hankel_pair(const Eigen::MatrixXd& states, std::size_t n_d, double dt) {
    const Index n = states.rows();
    const Index m = states.cols();
    const auto d = static_cast<Index>(n_d);
    if (m < d + 2) {
        throw ShapeError("Hankel embedding with " + std::to_string(n_d) + " delays needs at least " +
                         std::to_string(n_d + 2) + " samples, got " + std::to_string(m));
    }
    const Index cols = m - 1 - d;
    SnapshotPair pair{Eigen::MatrixXd(n * (d + 1), cols), Eigen::MatrixXd(n * (d + 1), cols), dt};
    for (Index j = 0; j < cols; ++j) {
        for (Index blk = 0; blk <= d; ++blk) {
            pair.x.block(blk * n, j, n, 1) = states.col(j + d - blk);
            pair.xp.block(blk * n, j, n, 1) = states.col(j + 1 + d - blk);
        }
    }
    return pair;
}

SnapshotPair build_hankel_pair(const MultivariateSeries& series, std::size_t n_d) {
    return build_hankel_pair(series.values(), n_d, series.dt());
}

Eigen::VectorXd delay_state(const Eigen::MatrixXd& states, std::size_t n_d, Index j) {
    const Index n = states.rows();
    const auto d = static_cast<Index>(n_d);
    if (j < d || j >= states.cols()) throw ShapeError("delay state index out of range");
    Eigen::VectorXd out(n * (d + 1));
    for (Index blk = 0; blk <= d; ++blk) out.segment(blk * n, n) = states.col(j - blk);
    return out;
}

HdmdForecaster fit_hdmd(const MultivariateSeries& series, const HdmdConfig& config, double t_end,
                        const HdmdOptions& options) {
    config.validate();
    const std::size_t last = series.index_at(t_end);
    if (last + 1 < config.n_tr) {
        std::ostringstream msg;
        msg << "training window of " << config.n_tr << " samples ending at t = " << t_end
            << " starts before the record (only " << last + 1 << " samples available)";
        throw ValidationError(msg.str());
    }
    const auto window = series.slice(last + 1 - config.n_tr, config.n_tr);
    const auto stats = zscore_fit(window, options.zscore);
    const Eigen::MatrixXd z = zscore_apply(window, stats).values();

    const auto n = static_cast<Index>(series.n_channels());
    const auto state_dim = static_cast<std::size_t>(n) * (config.n_d + 1);

    DmdModel model = DmdModel::zero(state_dim, series.dt());
    if (z.cwiseAbs().maxCoeff() > 0.0) {
        const auto pair = build_hankel_pair(z, config.n_d, series.dt());
        const Eigen::VectorXd x_last = pair.xp.col(pair.xp.cols() - 1);
        model = fit_exact_dmd(pair, config.rank_policy).initialized(x_last);
    }

    HdmdForecaster out(config, std::move(model));
    out.stats_ = stats;
    out.channels_ = series.channels();
    out.dt_ = series.dt();
    out.t_end_ = series.time(last);
    out.growth_guard_ = options.growth_guard;
    out.warnings_ = out.model_.warnings();
    for (Index k = 0; k < out.model_.eigenvalues().size(); ++k) {
        const double mag = std::abs(out.model_.eigenvalues()(k));
        if (mag > options.growth_guard) {
            std::ostringstream msg;
            msg << "unstable mode " << k << " (|lambda| = " << mag << ")";
            out.warnings_.push_back(msg.str());
        }
    }
    return out;
}

Eigen::MatrixXd HdmdForecaster::predict_normalized(std::size_t n_steps) const {
    return forecast(model_, n_steps, n_channels(), growth_guard_).states;
}

MultivariateSeries predict_steps(const HdmdForecaster& forecaster, std::size_t n_steps) {
    if (n_steps < 1) throw ValidationError("prediction horizon must cover at least one sample");
    const MultivariateSeries normalized(forecaster.channels(), forecaster.dt(),
                                        forecaster.predict_normalized(n_steps),
                                        forecaster.t_end() + forecaster.dt());
    return zscore_invert(normalized, forecaster.stats());
}

MultivariateSeries predict(const HdmdForecaster& forecaster, double horizon) {
    if (!(horizon >= forecaster.dt() * (1.0 - 1e-9))) {
        throw ValidationError("prediction horizon must be at least one sample interval");
    }
    return predict_steps(forecaster, samples_floor(horizon, forecaster.dt()));
}

}  // namespace hdmd
