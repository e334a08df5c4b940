#pragma once

#include "hdmd/dmd.hpp"
#include "hdmd/series.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace hdmd {

// Sample count of a duration, rounded to the nearest sample. This is the
// conversion used for deterministic hyperparameter grids.
std::size_t samples_nearest(double seconds, double dt);
// Integer part of seconds / dt, used for sampled (stochastic) durations.
std::size_t samples_floor(double seconds, double dt);

struct HdmdConfig {
    std::size_t n_tr = 0;  // training samples
    std::size_t n_d = 0;   // delayed copies
    RankPolicy rank_policy = RankPolicy::tolerance();

    std::size_t hankel_columns() const noexcept;
    bool is_valid() const noexcept;
    void validate() const;

    static HdmdConfig from_seconds(double l_tr, double l_d, double dt,
                                   RankPolicy policy = RankPolicy::tolerance());
};

// Block-Hankel snapshot pair of a state sequence (columns = samples). Block
// row 0 holds the most recent copy, block row n_d the most delayed one.
SnapshotPair build_hankel_pair(const Eigen::MatrixXd& states, std::size_t n_d, double dt);
SnapshotPair build_hankel_pair(const MultivariateSeries& series, std::size_t n_d);

// Stacked state [x_j; x_{j-1}; ...; x_{j-n_d}] ending at column j.
Eigen::VectorXd delay_state(const Eigen::MatrixXd& states, std::size_t n_d, Eigen::Index j);

struct HdmdOptions {
    ZScoreOptions zscore;
    double growth_guard = kDefaultGrowthGuard;
};

class HdmdForecaster {
public:
    const HdmdConfig& config() const noexcept { return config_; }
    const DmdModel& model() const noexcept { return model_; }
    const ZScoreStats& stats() const noexcept { return stats_; }
    const std::vector<std::string>& channels() const noexcept { return channels_; }
    double dt() const noexcept { return dt_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t n_channels() const noexcept { return channels_.size(); }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Forecast of the undelayed state in z-scored units, n_channels x n_steps.
    Eigen::MatrixXd predict_normalized(std::size_t n_steps) const;

private:
    friend HdmdForecaster fit_hdmd(const MultivariateSeries&, const HdmdConfig&, double,
                                   const HdmdOptions&);
    HdmdForecaster(HdmdConfig config, DmdModel model) : config_(std::move(config)), model_(std::move(model)) {}

    HdmdConfig config_;
    DmdModel model_;
    ZScoreStats stats_;
    std::vector<std::string> channels_;
    double dt_ = 0.0;
    double t_end_ = 0.0;
    double growth_guard_ = kDefaultGrowthGuard;
    std::vector<std::string> warnings_;
};

// Fits on the n_tr samples ending at t_end (inclusive), z-scored with the
// window's own statistics.
HdmdForecaster fit_hdmd(const MultivariateSeries& series, const HdmdConfig& config, double t_end,
                        const HdmdOptions& options = {});

// Physical-unit forecast; the first sample is at t_end + dt.
MultivariateSeries predict(const HdmdForecaster& forecaster, double horizon);
MultivariateSeries predict_steps(const HdmdForecaster& forecaster, std::size_t n_steps);

}  // namespace hdmd
