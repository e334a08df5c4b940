#include "hdmd/harness.hpp"

#include "hdmd/error.hpp"
#include "hdmd/parallel.hpp"
#include "hdmd/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hdmd {

void SweepPlan::validate() const {
    auto check = [](const std::vector<double>& levels, const char* name) {
        if (levels.empty()) throw ValidationError(std::string(name) + " levels are empty");
        for (double v : levels) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " levels must be positive");
        }
    };
    check(ltr_levels, "l_tr");
    check(ld_levels, "l_d");
    check(lte_levels, "l_te");
    if (n_test_instants < 1) throw ValidationError("need at least one test instant");
    if (bins < 1) throw ValidationError("need at least one histogram bin");
    if (!(t_ref > 0.0)) throw ValidationError("reference period must be positive");
}

PlanSamples plan_samples(const SweepPlan& plan, double dt) {
    plan.validate();
    PlanSamples out;
    for (double v : plan.ltr_levels) out.n_tr.push_back(samples_nearest(v * plan.t_ref, dt));
    for (double v : plan.ld_levels) out.n_d.push_back(samples_nearest(v * plan.t_ref, dt));
    for (double v : plan.lte_levels) out.n_te.push_back(samples_nearest(v * plan.t_ref, dt));
    for (std::size_t n : out.n_te) {
        if (n < 1) throw ValidationError("test length shorter than one sample");
    }
    return out;
}

std::vector<SweepCell> sweep_cells(const SweepPlan& plan, double dt) {
    const auto counts = plan_samples(plan, dt);
    std::vector<SweepCell> cells;
    for (std::size_t i = 0; i < plan.ltr_levels.size(); ++i) {
        for (std::size_t k = 0; k < plan.ld_levels.size(); ++k) {
            SweepCell c{plan.ltr_levels[i], plan.ld_levels[k], counts.n_tr[i], counts.n_d[k], false, {}};
            if (!HdmdConfig{c.n_tr, c.n_d, plan.rank_policy}.is_valid()) {
                c.skipped = true;
                std::ostringstream msg;
                msg << "n_tr - 1 - n_d = " << static_cast<long long>(c.n_tr) - 1 - static_cast<long long>(c.n_d)
                    << " < 2";
                c.skip_reason = msg.str();
            }
            cells.push_back(std::move(c));
        }
    }
    return cells;
}

std::vector<std::size_t> random_test_indices(const MultivariateSeries& series, const SweepPlan& plan) {
    const auto counts = plan_samples(plan, series.dt());
    const std::size_t max_tr = *std::max_element(counts.n_tr.begin(), counts.n_tr.end());
    const std::size_t max_te = *std::max_element(counts.n_te.begin(), counts.n_te.end());
    const std::size_t n = series.n_samples();
    if (max_tr < 1 || n < max_tr + max_te) {
        std::ostringstream msg;
        msg << "record of " << n << " samples is too short: need at least " << max_tr + max_te << " samples ("
            << static_cast<double>(max_tr + max_te) * series.dt() << " s) for the longest training and test windows";
        throw ValidationError(msg.str());
    }
    const auto lo = static_cast<std::int64_t>(max_tr - 1);
    const auto hi = static_cast<std::int64_t>(n - 1 - max_te);
    SeededRng rng(plan.seed);
    std::vector<std::size_t> out(plan.n_test_instants);
    for (auto& j : out) j = static_cast<std::size_t>(rng.uniform_int(lo, hi));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> random_test_instants(const MultivariateSeries& series, const SweepPlan& plan) {
    std::vector<double> out;
    for (std::size_t j : random_test_indices(series, plan)) out.push_back(series.time(j));
    return out;
}

namespace {

double quantile_sorted(const std::vector<double>& x, double p) {
    const double pos = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return x[lo] + frac * (x[hi] - x[lo]);
}

double metric_of(const MetricsReport& r, const std::string& metric) {
    if (metric == "nrmse") return r.nrmse_avg;
    if (metric == "nammae") return r.nammae_avg;
    if (metric == "jsd") return r.jsd_avg;
    throw ValidationError("unknown metric '" + metric + "'");
}

SweepResult run_on_instants(const MultivariateSeries& series, const SweepPlan& plan,
                            const std::vector<std::size_t>& instants) {
    SweepResult out;
    out.plan = plan;
    out.dt = series.dt();
    out.dataset_id = dataset_fingerprint(series);
    out.channels = series.channels();
    out.cells = sweep_cells(plan, series.dt());
    out.n_te = plan_samples(plan, series.dt()).n_te;
    out.instants = instants;
    for (std::size_t j : instants) out.instant_times.push_back(series.time(j));
    for (const auto& c : out.cells) {
        if (c.skipped) {
            std::ostringstream msg;
            msg << "skipped l_tr = " << c.l_tr << "T (n_tr = " << c.n_tr << "), l_d = " << c.l_d
                << "T (n_d = " << c.n_d << "): " << c.skip_reason;
            out.skipped_log.push_back(msg.str());
        }
    }

    const MultivariateSeries data = plan.filter ? lowpass_filter(series, plan.filter_spec) : series;

    std::vector<std::size_t> valid;
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        if (!out.cells[c].skipped) valid.push_back(c);
    }
    const std::size_t n_inst = instants.size();
    const std::size_t n_lte = out.n_te.size();
    const std::size_t max_te = *std::max_element(out.n_te.begin(), out.n_te.end());

    out.samples.resize(valid.size() * n_inst * n_lte);
    parallel_for(valid.size() * n_inst, plan.workers, [&](std::size_t item) {
        const std::size_t vc = item / n_inst;
        const std::size_t inst = item % n_inst;
        const SweepCell& cell = out.cells[valid[vc]];
        const std::size_t last = instants[inst];
        SweepSample* slot = &out.samples[item * n_lte];
        for (std::size_t l = 0; l < n_lte; ++l) slot[l] = SweepSample{valid[vc], inst, l, std::nullopt, {}};
        try {
            const HdmdConfig config{cell.n_tr, cell.n_d, plan.rank_policy};
            const auto forecaster = fit_hdmd(data, config, data.time(last), plan.hdmd);
            const Eigen::MatrixXd pred = predict_steps(forecaster, max_te).values();
            for (std::size_t l = 0; l < n_lte; ++l) {
                const auto n_te = static_cast<Eigen::Index>(out.n_te[l]);
                const Eigen::MatrixXd truth =
                    data.values().middleCols(static_cast<Eigen::Index>(last + 1), n_te);
                try {
                    slot[l].report = evaluate_all(pred.leftCols(n_te), truth, data.channels(), plan.bins);
                } catch (const Error& e) {
                    slot[l].error = e.what();
                }
            }
        } catch (const Error& e) {
            for (std::size_t l = 0; l < n_lte; ++l) slot[l].error = e.what();
        }
    });

    for (std::size_t vc = 0; vc < valid.size(); ++vc) {
        for (std::size_t l = 0; l < n_lte; ++l) {
            SweepSummary s{valid[vc], l, 0, std::nullopt, std::nullopt, std::nullopt};
            std::vector<double> a, b, c;
            for (std::size_t inst = 0; inst < n_inst; ++inst) {
                const auto& sample = out.samples[(vc * n_inst + inst) * n_lte + l];
                if (!sample.report) {
                    ++s.n_failures;
                    continue;
                }
                a.push_back(sample.report->nrmse_avg);
                b.push_back(sample.report->nammae_avg);
                c.push_back(sample.report->jsd_avg);
            }
            if (!a.empty()) {
                s.nrmse = boxplot_stats(a);
                s.nammae = boxplot_stats(b);
                s.jsd = boxplot_stats(c);
            }
            out.summaries.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace

BoxplotStats boxplot_stats(std::span<const double> samples) {
    if (samples.empty()) throw ValidationError("boxplot statistics need at least one sample");
    std::vector<double> x(samples.begin(), samples.end());
    for (double v : x) {
        if (std::isnan(v)) throw ValidationError("boxplot samples contain NaN");
    }
    std::sort(x.begin(), x.end());
    BoxplotStats s;
    s.n = x.size();
    s.q1 = quantile_sorted(x, 0.25);
    s.median = quantile_sorted(x, 0.5);
    s.q3 = quantile_sorted(x, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.q1;
    s.whisker_hi = s.q3;
    for (double v : x) {
        if (v < lo_fence || v > hi_fence) {
            ++s.n_outliers;
            continue;
        }
        s.whisker_lo = std::min(s.whisker_lo, v);
        s.whisker_hi = std::max(s.whisker_hi, v);
    }
    return s;
}

std::vector<double> SweepResult::pooled(std::size_t lte, const std::string& metric) const {
    std::vector<double> out;
    for (const auto& s : samples) {
        if (s.lte == lte && s.report) out.push_back(metric_of(*s.report, metric));
    }
    return out;
}

SweepResult run_sweep(const MultivariateSeries& series, const SweepPlan& plan) {
    plan.validate();
    return run_on_instants(series, plan, random_test_indices(series, plan));
}

PairedSweep compare_filtered_unfiltered(const MultivariateSeries& series, const SweepPlan& plan) {
    plan.validate();
    const auto instants = random_test_indices(series, plan);
    SweepPlan on = plan;
    on.filter = true;
    SweepPlan off = plan;
    off.filter = false;
    return PairedSweep{run_on_instants(series, on, instants), run_on_instants(series, off, instants)};
}

std::string dataset_fingerprint(const MultivariateSeries& series) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const void* data, std::size_t size) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& name : series.channels()) {
        feed(name.data(), name.size());
        feed("\0", 1);
    }
    const double grid[2] = {series.dt(), series.t0()};
    feed(grid, sizeof grid);
    // Column-major storage; channel values of each snapshot are contiguous.
    feed(series.values().data(), sizeof(double) * static_cast<std::size_t>(series.values().size()));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hdmd
