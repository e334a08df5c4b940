#pragma once

#include "hdmd/hankel.hpp"
#include "hdmd/random.hpp"
#include "hdmd/series.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hdmd {

struct ShdmdConfig {
    std::size_t n_realizations = 100;
    // l_tr / T_ref ~ U(ltr_lo, ltr_hi)
    double ltr_lo = 4.0;
    double ltr_hi = 16.0;
    // l_d / l_tr ~ U(ld_lo_ratio, ld_hi_ratio)
    double ld_lo_ratio = 0.125;
    double ld_hi_ratio = 1.0;
    double coverage = 2.0;
    std::uint64_t seed = 1;
    std::size_t max_retries = 100;
    RankPolicy rank_policy = RankPolicy::tolerance();
    HdmdOptions hdmd;
    std::size_t workers = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct SampledHyperparams {
    std::size_t n_tr = 0;
    std::size_t n_d = 0;
    double l_tr = 0.0;  // seconds, as drawn
    double l_d = 0.0;
    std::size_t retries = 0;
};

// One draw of (l_tr, l_d) converted to sample counts by integer part. The
// result may violate the Hankel shape rule.
SampledHyperparams draw_hyperparams(SeededRng& rng, const ShdmdConfig& config, double t_ref, double dt);
// As draw_hyperparams, but draws violating the shape rule are redrawn up to
// max_retries times.
SampledHyperparams sample_hyperparams(SeededRng& rng, const ShdmdConfig& config, double t_ref, double dt);

struct RealizationInfo {
    SampledHyperparams params;
    bool ok = false;
    std::string error;
    std::vector<std::string> warnings;
};

struct Band {
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;
};

struct StochasticForecast {
    MultivariateSeries mean;
    Eigen::MatrixXd stddev;  // channels x samples, population std over members
    Band band;
    double coverage = 2.0;
    std::vector<RealizationInfo> realizations;
    std::vector<Eigen::MatrixXd> members;  // successful predictions, physical units

    std::size_t ensemble_size() const noexcept { return members.size(); }
};

StochasticForecast shdmd_forecast(const MultivariateSeries& series, const ShdmdConfig& config, double t_ref,
                                  double t_end, double horizon);

Band chebyshev_band(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& stddev, double k);

// Fraction of member samples of each channel inside mean +/- k std.
Eigen::VectorXd ensemble_coverage(const StochasticForecast& forecast, double k);

}  // namespace hdmd
