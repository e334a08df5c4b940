#pragma once

#include "hdmd/hankel.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/series.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdmd {

// Full-factorial sweep over (l_tr, l_d) cells. All lengths are multiples of
// the reference period t_ref.
struct SweepPlan {
    std::vector<double> ltr_levels{1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> ld_levels{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> lte_levels{1.0, 2.0, 4.0};
    std::size_t n_test_instants = 250;
    std::uint64_t seed = 1;
    bool filter = true;
    FilterSpec filter_spec;
    std::size_t bins = kDefaultJsdBins;
    double t_ref = 7.3143;
    RankPolicy rank_policy = RankPolicy::tolerance();
    HdmdOptions hdmd;
    std::size_t workers = 0;

    void validate() const;
};

// Level-to-sample conversion of a plan (nearest sample).
struct PlanSamples {
    std::vector<std::size_t> n_tr;
    std::vector<std::size_t> n_d;
    std::vector<std::size_t> n_te;
};

PlanSamples plan_samples(const SweepPlan& plan, double dt);

struct SweepCell {
    double l_tr = 0.0;  // multiples of t_ref
    double l_d = 0.0;
    std::size_t n_tr = 0;
    std::size_t n_d = 0;
    bool skipped = false;
    std::string skip_reason;
};

// Cells in row-major order (l_tr outer, l_d inner), skipped ones included.
std::vector<SweepCell> sweep_cells(const SweepPlan& plan, double dt);

// Sample indices of the last training snapshot, uniform over the interval
// where the longest training window and the longest test window both fit.
// Sorted ascending; duplicates allowed.
std::vector<std::size_t> random_test_indices(const MultivariateSeries& series, const SweepPlan& plan);
std::vector<double> random_test_instants(const MultivariateSeries& series, const SweepPlan& plan);

struct BoxplotStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::size_t n_outliers = 0;
    std::size_t n = 0;
};

BoxplotStats boxplot_stats(std::span<const double> samples);

struct SweepSample {
    std::size_t cell = 0;
    std::size_t instant = 0;  // position in SweepResult::instants
    std::size_t lte = 0;      // position in plan.lte_levels
    std::optional<MetricsReport> report;
    std::string error;  // set when the fit or evaluation failed
};

struct SweepSummary {
    std::size_t cell = 0;
    std::size_t lte = 0;
    std::size_t n_failures = 0;
    std::optional<BoxplotStats> nrmse;  // empty when every sample failed
    std::optional<BoxplotStats> nammae;
    std::optional<BoxplotStats> jsd;
};

struct SweepResult {
    SweepPlan plan;
    double dt = 0.0;
    std::string dataset_id;
    std::vector<std::string> channels;
    std::vector<SweepCell> cells;
    std::vector<std::size_t> n_te;
    std::vector<std::size_t> instants;      // sample index of the last training snapshot
    std::vector<double> instant_times;
    std::vector<SweepSample> samples;       // keyed (cell, instant, lte), row-major; valid cells only
    std::vector<SweepSummary> summaries;    // valid cells x l_te levels
    std::vector<std::string> skipped_log;

    // Channel-averaged metric values of successful samples at one l_te
    // level, pooled over all cells.
    std::vector<double> pooled(std::size_t lte, const std::string& metric) const;
};

SweepResult run_sweep(const MultivariateSeries& series, const SweepPlan& plan);

struct PairedSweep {
    SweepResult filtered;
    SweepResult unfiltered;
};

// Runs the plan twice (filter on and off) on identical instants.
PairedSweep compare_filtered_unfiltered(const MultivariateSeries& series, const SweepPlan& plan);

// Stable 64-bit FNV-1a fingerprint of channel names, grid and values.
std::string dataset_fingerprint(const MultivariateSeries& series);

}  // namespace hdmd
