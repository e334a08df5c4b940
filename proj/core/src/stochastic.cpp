#include "hdmd/stochastic.hpp"

#include "hdmd/error.hpp"
#include "hdmd/parallel.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace hdmd {

void ShdmdConfig::validate() const {
    if (n_realizations < 1) throw ValidationError("need at least one realization");
    if (!(ltr_lo > 0.0 && ltr_lo <= ltr_hi)) throw ValidationError("training-length range must satisfy 0 < lo <= hi");
    if (!(ld_lo_ratio > 0.0 && ld_lo_ratio <= ld_hi_ratio && ld_hi_ratio <= 1.0)) {
        throw ValidationError("delay ratio range must satisfy 0 < lo <= hi <= 1");
    }
    if (!(coverage > 0.0)) throw ValidationError("coverage factor must be positive");
}

SampledHyperparams draw_hyperparams(SeededRng& rng, const ShdmdConfig& config, double t_ref, double dt) {
    if (!(t_ref > 0.0)) throw ValidationError("reference period must be positive");
    SampledHyperparams out;
    out.l_tr = t_ref * rng.uniform(config.ltr_lo, config.ltr_hi);
    out.l_d = out.l_tr * rng.uniform(config.ld_lo_ratio, config.ld_hi_ratio);
    out.n_tr = samples_floor(out.l_tr, dt);
    out.n_d = samples_floor(out.l_d, dt);
    return out;
}

SampledHyperparams sample_hyperparams(SeededRng& rng, const ShdmdConfig& config, double t_ref, double dt) {
    config.validate();
    for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
        auto out = draw_hyperparams(rng, config, t_ref, dt);
        out.retries = attempt;
        if (HdmdConfig{out.n_tr, out.n_d, config.rank_policy}.is_valid()) return out;
    }
    throw ValidationError("no valid (n_tr, n_d) draw after " + std::to_string(config.max_retries) +
                          " retries; widen the ranges");
}

Band chebyshev_band(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& stddev, double k) {
    if (mean.rows() != stddev.rows() || mean.cols() != stddev.cols()) {
        throw ShapeError("mean and standard deviation shapes differ");
    }
    if (!(k > 0.0)) throw ValidationError("coverage factor must be positive");
    return Band{mean - k * stddev, mean + k * stddev};
}

StochasticForecast shdmd_forecast(const MultivariateSeries& series, const ShdmdConfig& config, double t_ref,
                                  double t_end, double horizon) {
    config.validate();
    const std::size_t last = series.index_at(t_end);
    const std::size_t n_steps = samples_floor(horizon, series.dt());
    if (n_steps < 1) throw ValidationError("prediction horizon must cover at least one sample");
    const std::size_t max_tr = samples_floor(config.ltr_hi * t_ref, series.dt());
    if (last + 1 < max_tr) {
        std::ostringstream msg;
        msg << "the longest training window (" << max_tr << " samples) does not fit before t = " << t_end;
        throw ValidationError(msg.str());
    }

    // All draws happen up front so results do not depend on scheduling.
    // Draws with an invalid Hankel window are kept as failed realizations.
    SeededRng rng(config.seed);
    std::vector<RealizationInfo> info(config.n_realizations);
    for (auto& r : info) r.params = draw_hyperparams(rng, config, t_ref, series.dt());

    std::vector<std::optional<Eigen::MatrixXd>> predictions(config.n_realizations);
    parallel_for(config.n_realizations, config.workers, [&](std::size_t i) {
        try {
            const HdmdConfig hc{info[i].params.n_tr, info[i].params.n_d, config.rank_policy};
            const auto forecaster = fit_hdmd(series, hc, t_end, config.hdmd);
            predictions[i] = predict_steps(forecaster, n_steps).values();
            info[i].warnings = forecaster.warnings();
            info[i].ok = true;
        } catch (const Error& e) {
            info[i].error = e.what();
        }
    });

    StochasticForecast out{MultivariateSeries(series.channels(), series.dt(),
                                              Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(series.n_channels()),
                                                                    static_cast<Eigen::Index>(n_steps)),
                                              series.time(last) + series.dt()),
                           {}, {}, config.coverage, std::move(info), {}};
    for (auto& p : predictions) {
        if (p) out.members.push_back(std::move(*p));
    }
    const std::size_t failed = config.n_realizations - out.members.size();
    if (out.members.empty() || 2 * failed > config.n_realizations) {
        std::ostringstream msg;
        msg << failed << " of " << config.n_realizations << " realizations failed";
        for (const auto& r : out.realizations) {
            if (!r.ok) {
                msg << "; first error: " << r.error;
                break;
            }
        }
        throw Error(msg.str());
    }

    const auto members = static_cast<double>(out.members.size());
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(out.mean.values().rows(), out.mean.values().cols());
    for (const auto& m : out.members) mean += m;
    mean /= members;
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
    for (const auto& m : out.members) var += (m - mean).cwiseAbs2();
    out.stddev = (var / members).cwiseSqrt();
    out.band = chebyshev_band(mean, out.stddev, config.coverage);
    out.mean = out.mean.with_values(std::move(mean));
    return out;
}

Eigen::VectorXd ensemble_coverage(const StochasticForecast& forecast, double k) {
    const auto& mean = forecast.mean.values();
    Eigen::VectorXd inside = Eigen::VectorXd::Zero(mean.rows());
    for (const auto& m : forecast.members) {
        const Eigen::MatrixXd dev = (m - mean).cwiseAbs();
        for (Eigen::Index c = 0; c < mean.rows(); ++c) {
            for (Eigen::Index j = 0; j < mean.cols(); ++j) {
                if (dev(c, j) <= k * forecast.stddev(c, j) * (1.0 + 1e-12) + 1e-300) inside(c) += 1.0;
            }
        }
    }
    const double total = static_cast<double>(forecast.members.size()) * static_cast<double>(mean.cols());
    return total > 0.0 ? Eigen::VectorXd(inside / total) : inside;
}

}  // namespace hdmd
