#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdmd {

// Uniformly sampled multichannel record. Row i of values() is channel i,
// column j is the snapshot at time t0 + j * dt.
class MultivariateSeries {
public:
    MultivariateSeries(std::vector<std::string> channels, double dt, Eigen::MatrixXd values,
                       double t0 = 0.0);

    const std::vector<std::string>& channels() const noexcept { return channels_; }
    double dt() const noexcept { return dt_; }
    double t0() const noexcept { return t0_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    std::size_t n_channels() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t n_samples() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    double time(std::size_t j) const noexcept { return t0_ + static_cast<double>(j) * dt_; }
    double end_time() const noexcept { return time(n_samples() - 1); }

    // Index of the sample at time t, snapping to the grid within 1e-6 * dt.
    // Throws ValidationError if t is off-grid or outside the record.
    std::size_t index_at(double t) const;

    std::optional<std::size_t> channel_index(const std::string& name) const;

    // Samples [first, first + count).
    MultivariateSeries slice(std::size_t first, std::size_t count) const;

    MultivariateSeries with_values(Eigen::MatrixXd values) const;

private:
    std::vector<std::string> channels_;
    double dt_;
    Eigen::MatrixXd values_;
    double t0_;
};

struct ZScoreStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
};

struct ZScoreOptions {
    // When set, channels whose spread is numerically zero are standardized
    // with this standard deviation instead of being rejected.
    std::optional<double> constant_channel_std;
};

struct FilterSpec {
    double cutoff_hz = 0.5;
    std::size_t taps = 101;

    void validate(double dt) const;
};

// Population (divide-by-N) statistics, used everywhere in the library.
double population_mean(std::span<const double> x);
double population_std(std::span<const double> x);

// Linear interpolation of (t, v) at the query times. Queries outside
// [t.front(), t.back()] throw ValidationError; the library never extrapolates.
std::vector<double> interpolate_linear(std::span<const double> t, std::span<const double> v,
                                       std::span<const double> query);

// Uniform grid t[0], t[0] + dt, ... up to the last point not beyond t.back().
std::vector<double> uniform_grid(std::span<const double> t, double dt_target);

std::vector<double> resample_uniform(std::span<const double> t, std::span<const double> v,
                                     double dt_target);

// Reads `time,<ch1>,<ch2>,...` CSV and resamples onto a dt_target grid.
MultivariateSeries load_csv(const std::filesystem::path& path, double dt_target);
MultivariateSeries parse_csv(const std::string& text, double dt_target);

// Writes the same format load_csv reads, with round-trip exact precision.
void write_csv(const MultivariateSeries& series, const std::filesystem::path& path);
std::string format_csv(const MultivariateSeries& series);

ZScoreStats zscore_fit(const MultivariateSeries& series, const ZScoreOptions& options = {});
MultivariateSeries zscore_apply(const MultivariateSeries& series, const ZScoreStats& stats);
MultivariateSeries zscore_invert(const MultivariateSeries& series, const ZScoreStats& stats);

// Hamming-windowed sinc, normalized to unit DC gain.
Eigen::VectorXd design_lowpass(const FilterSpec& spec, double dt);

// Zero-phase FIR filtering of every channel with reflected edges; the
// output has the same length as the input.
MultivariateSeries lowpass_filter(const MultivariateSeries& series, const FilterSpec& spec);

}  // namespace hdmd
