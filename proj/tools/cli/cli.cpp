#include "cli.hpp"

#include "hdmd/error.hpp"
#include "hdmd/harness.hpp"
#include "hdmd/hankel.hpp"
#include "hdmd/io.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/modal.hpp"
#include "hdmd/series.hpp"
#include "hdmd/stochastic.hpp"
#include "hdmd/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef HDMD_VERSION
#define HDMD_VERSION "0.0.0"
#endif

namespace hdmd::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double Length::seconds(double t_ref, double l_tr) const {
    switch (unit) {
        case 'T': return value * t_ref;
        case 'R': return value * l_tr;
        default: return value;
    }
}

Length parse_length(const std::string& text, bool allow_ratio) {
    if (text.empty()) throw ValidationError("empty length value");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    const std::string suffix(end);
    if (end == text.c_str() || !(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError("invalid length '" + text + "': expected a positive number with optional unit s, T or R");
    }
    if (suffix.empty() || suffix == "s") return {v, 's'};
    if (suffix == "T") return {v, 'T'};
    if (suffix == "R" && allow_ratio) {
        if (v > 1.0) throw ValidationError("delay ratio '" + text + "' exceeds 1");
        return {v, 'R'};
    }
    throw ValidationError("invalid length unit in '" + text + "'" + (allow_ratio ? "" : " (R is only valid for --ld)"));
}

namespace {

// Key choices that affect numbers; copied into every manifest.
const std::vector<std::string> kDecisions = {
    "fixed lengths convert to samples by rounding to the nearest sample",
    "sampled stochastic lengths convert to samples by integer part",
    "z-score statistics come from the training window",
    "low-pass filter is applied to the whole record before windowing; truth windows use the filtered signal",
    "test instants are drawn once and shared by all sweep cells",
    "population standard deviation everywhere",
    "failed fits are recorded and excluded from statistics",
};

struct Source {
    std::string data;
    std::string synth;
    bool composite = false;
    double duration = 3600.0;
    double noise = 0.0;
    std::uint64_t synth_seed = 7;
};

struct Common {
    Source source;
    double dt = 0.1;
    bool no_filter = false;
    double fc = 0.5;
    std::size_t taps = 101;
    std::string period = "auto";
    std::string period_channel;
    std::string rank = "tol:1e-10";
    std::size_t workers = 0;
    std::string out;
};

void add_source(CLI::App* cmd, Source& s) {
    auto* g = cmd->add_option_group("data source");
    g->add_option("--data", s.data, "CSV file with a leading time column");
    g->add_option("--synth", s.synth, "JSON synthetic system spec");
    g->add_flag("--composite", s.composite, "15-channel composite synthetic record");
    g->require_option(1);
    cmd->add_option("--duration", s.duration, "composite record duration [s]")->capture_default_str();
    cmd->add_option("--noise", s.noise, "composite white-noise std")->capture_default_str();
    cmd->add_option("--synth-seed", s.synth_seed, "composite generator seed")->capture_default_str();
}

void add_common(CLI::App* cmd, Common& c) {
    add_source(cmd, c.source);
    cmd->add_option("--dt", c.dt, "sampling interval [s] (resampling target for --data)")->capture_default_str();
    cmd->add_flag("--no-filter{true},--filter{false}", c.no_filter, "disable / enable low-pass filtering");
    cmd->add_option("--fc", c.fc, "filter cutoff [Hz]")->capture_default_str();
    cmd->add_option("--taps", c.taps, "filter length (odd)")->capture_default_str();
    cmd->add_option("--te-period,--period", c.period, "reference period: auto or seconds")->capture_default_str();
    cmd->add_option("--period-channel", c.period_channel, "channel for the automatic period (default: wave or first)");
    cmd->add_option("--rank", c.rank, "rank policy: full | tol:<rel> | fixed:<r>")->capture_default_str();
    cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--out", c.out, "output directory")->required();
}

struct Prepared {
    MultivariateSeries raw;
    MultivariateSeries data;  // filtered when the filter is on
    json source;
    FilterSpec filter;
    bool filtered = false;
};

Prepared prepare(const Common& c) {
    json src;
    std::optional<MultivariateSeries> raw;
    if (!c.source.data.empty()) {
        raw = load_csv(c.source.data, c.dt);
        src = {{"kind", "csv"}, {"path", c.source.data}, {"dt", c.dt}};
    } else if (!c.source.synth.empty()) {
        const SynthSpec spec = synth_spec_from_json(read_text(c.source.synth));
        raw = generate(spec).series;
        src = {{"kind", "synth"}, {"spec", json::parse(synth_spec_json(spec))}};
    } else {
        CompositeSpec spec;
        spec.duration = c.source.duration;
        spec.dt = c.dt;
        spec.noise_std = c.source.noise;
        spec.seed = c.source.synth_seed;
        raw = generate_composite(spec).series;
        src = {{"kind", "composite"},
               {"duration", spec.duration},
               {"dt", spec.dt},
               {"noise_std", spec.noise_std},
               {"seed", spec.seed}};
    }
    src["dataset_id"] = dataset_fingerprint(*raw);
    src["channels"] = raw->channels();
    src["n_samples"] = raw->n_samples();

    FilterSpec filter{c.fc, c.taps};
    if (!c.no_filter) {
        auto data = lowpass_filter(*raw, filter);
        return Prepared{std::move(*raw), std::move(data), std::move(src), filter, true};
    }
    auto copy = *raw;
    return Prepared{std::move(*raw), std::move(copy), std::move(src), filter, false};
}

struct Period {
    double t_ref = 0.0;
    json info;
    std::optional<SpectrumPeak> peak;
    std::string channel;
};

Period resolve_period(const Common& c, const MultivariateSeries& raw) {
    Period p;
    if (c.period != "auto") {
        char* end = nullptr;
        p.t_ref = std::strtod(c.period.c_str(), &end);
        const std::string rest(end);
        if (end == c.period.c_str() || !(rest.empty() || rest == "s") || !(p.t_ref > 0.0)) {
            throw ValidationError("--te-period must be 'auto' or a positive number of seconds");
        }
        p.info = {{"source", "given"}, {"t_ref", p.t_ref}};
        return p;
    }
    std::size_t ch = 0;
    if (!c.period_channel.empty()) {
        const auto idx = raw.channel_index(c.period_channel);
        if (!idx) throw ValidationError("unknown period channel '" + c.period_channel + "'");
        ch = *idx;
    } else if (const auto idx = raw.channel_index("wave")) {
        ch = *idx;
    }
    const Eigen::VectorXd x = raw.values().row(static_cast<Eigen::Index>(ch)).transpose();
    p.peak = reference_period(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), raw.dt());
    p.t_ref = p.peak->period_s;
    p.channel = raw.channels()[ch];
    p.info = {{"source", "spectrum peak"},
              {"channel", p.channel},
              {"peak_hz", p.peak->frequency_hz},
              {"resolution_hz", p.peak->resolution_hz()},
              {"t_ref", p.t_ref}};
    return p;
}

json manifest_base(const std::string& command, const std::vector<std::string>& args, const Common& c,
                   const Prepared& prep) {
    json m;
    m["tool"] = "hdmd";
    m["version"] = HDMD_VERSION;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["command"] = command;
    m["argv"] = args;
    m["source"] = prep.source;
    m["preprocessing"] = {{"filter", prep.filtered},
                          {"cutoff_hz", prep.filter.cutoff_hz},
                          {"taps", prep.filter.taps},
                          {"rank_policy", RankPolicy::parse(c.rank).to_string()}};
    m["decisions"] = kDecisions;
    return m;
}

void finish(json& manifest, const fs::path& out, const std::vector<std::string>& files) {
    manifest["outputs"] = files;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    Common common;
    std::string ltr;
    std::string ld = "0";
    std::optional<double> t_end;
    std::size_t top = 3;
};

int cmd_analyze(const AnalyzeArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const auto prep = prepare(a.common);
    const auto& data = prep.data;
    const fs::path dir(a.common.out);
    fs::create_directories(dir);

    const std::size_t last = a.t_end ? data.index_at(*a.t_end) : data.n_samples() - 1;
    std::optional<Period> period;
    auto t_ref = [&]() {
        if (!period) period = resolve_period(a.common, prep.raw);
        return period->t_ref;
    };
    std::size_t n_tr = last + 1;
    double l_tr = static_cast<double>(n_tr) * data.dt();
    if (!a.ltr.empty()) {
        const Length len = parse_length(a.ltr);
        l_tr = len.seconds(len.unit == 'T' ? t_ref() : 0.0);
        n_tr = samples_nearest(l_tr, data.dt());
    }
    std::size_t n_d = 0;
    if (a.ld != "0") {
        const Length len = parse_length(a.ld, true);
        n_d = samples_nearest(len.seconds(len.unit == 'T' ? t_ref() : 0.0, l_tr), data.dt());
    }
    const HdmdConfig config{n_tr, n_d, RankPolicy::parse(a.common.rank)};
    config.validate();
    if (last + 1 < n_tr) throw ValidationError("analysis window extends before the start of the record");

    const auto window = data.slice(last + 1 - n_tr, n_tr);
    const auto stats = zscore_fit(window);
    const Eigen::MatrixXd z = zscore_apply(window, stats).values();
    if (a.common.period == "auto" || period) t_ref();

    const auto pair = build_hankel_pair(z, n_d, data.dt());
    const auto model = fit_exact_dmd(pair, config.rank_policy);
    const auto report = modal_energy_ranking(model, pair, data.channels());

    std::vector<std::string> files = {"modal.json", "modal.txt", "model.json"};
    write_text(dir / "modal.json", modal_report_json(report));
    write_text(dir / "modal.txt", format_modal_table(report, a.top));
    write_text(dir / "model.json", model_json(model, data.n_channels()));
    if (period && period->peak) {
        write_text(dir / "spectrum.dat", spectrum_text(*period->peak));
        files.push_back("spectrum.dat");
    }

    auto manifest = manifest_base("analyze", args, a.common, prep);
    json cfg = {{"n_tr", n_tr}, {"n_d", n_d}, {"t_end", data.time(last)}, {"rank", model.rank()}};
    if (period) {
        manifest["reference_period"] = period->info;
        out << "reference period T = " << fmt(period->t_ref) << " s";
        if (!period->channel.empty()) out << " (channel " << period->channel << ")";
        out << '\n';
    }
    manifest["config"] = cfg;
    manifest["warnings"] = report.warnings;
    finish(manifest, dir, files);

    out << "window: " << n_tr << " samples, n_d = " << n_d << ", rank " << model.rank() << ", reconstruction error "
        << fmt(model.reconstruction_error(), 3) << '\n';
    out << format_modal_table(report, a.top);
    return 0;
}

// --------------------------------------------------------------- forecast

struct ForecastArgs {
    Common common;
    std::string ltr = "10T";
    std::string ld = "0.5625R";
    std::string lte = "1T";
    std::optional<double> t_end;
    std::size_t bins = kDefaultJsdBins;
    bool stochastic = false;
    std::size_t realizations = 100;
    std::string ltr_range = "4:16";
    std::string ld_ratio_range = "0.125:1";
    double coverage = 2.0;
    std::uint64_t seed = 1;
};

std::pair<double, double> parse_range(const std::string& text, const char* flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ValidationError(std::string(flag) + " expects lo:hi");
    char* end = nullptr;
    const double lo = std::strtod(text.substr(0, colon).c_str(), &end);
    const bool ok_lo = *end == '\0' && colon > 0;
    const double hi = std::strtod(text.substr(colon + 1).c_str(), &end);
    const bool ok_hi = *end == '\0' && colon + 1 < text.size();
    if (!ok_lo || !ok_hi) throw ValidationError(std::string(flag) + " expects lo:hi, got '" + text + "'");
    return {lo, hi};
}

json metrics_summary(const MetricsReport& r) {
    return {{"nrmse", r.nrmse_avg}, {"nammae", r.nammae_avg}, {"jsd", r.jsd_avg}};
}

int cmd_forecast(const ForecastArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const auto prep = prepare(a.common);
    const auto& data = prep.data;
    const fs::path dir(a.common.out);
    fs::create_directories(dir);
    const auto period = resolve_period(a.common, prep.raw);
    const double t_ref = period.t_ref;

    const Length lte = parse_length(a.lte);
    const std::size_t n_te = samples_nearest(lte.seconds(t_ref), data.dt());
    if (n_te < 1) throw ValidationError("test length shorter than one sample");

    std::size_t last = 0;
    if (a.t_end) {
        last = data.index_at(*a.t_end);
    } else {
        if (data.n_samples() < n_te + 2) throw ValidationError("record too short for the requested horizon");
        last = data.n_samples() - 1 - n_te;
    }
    const double t_end = data.time(last);
    const bool has_truth = last + n_te < data.n_samples();
    std::optional<Eigen::MatrixXd> truth;
    if (has_truth) {
        truth = data.values().middleCols(static_cast<Eigen::Index>(last + 1), static_cast<Eigen::Index>(n_te));
    }

    auto manifest = manifest_base("forecast", args, a.common, prep);
    manifest["reference_period"] = period.info;
    out << "reference period T = " << fmt(t_ref) << " s\n";
    std::vector<std::string> files;

    if (!a.stochastic) {
        const Length ltr = parse_length(a.ltr);
        const double l_tr = ltr.seconds(t_ref);
        const Length ld = parse_length(a.ld, true);
        const HdmdConfig config = HdmdConfig::from_seconds(l_tr, ld.seconds(t_ref, l_tr), data.dt(),
                                                           RankPolicy::parse(a.common.rank));
        const auto forecaster = fit_hdmd(data, config, t_end);
        const auto pred = predict_steps(forecaster, n_te);
        write_text(dir / "forecast.csv", format_csv(pred));
        write_text(dir / "model.json", forecaster_json(forecaster));
        files = {"forecast.csv", "model.json"};
        manifest["config"] = {{"mode", "deterministic"}, {"n_tr", config.n_tr}, {"n_d", config.n_d},
                              {"n_te", n_te},           {"t_end", t_end},       {"rank", forecaster.model().rank()},
                              {"bins", a.bins}};
        manifest["warnings"] = forecaster.warnings();
        out << "n_tr = " << config.n_tr << ", n_d = " << config.n_d << ", n_te = " << n_te << ", rank "
            << forecaster.model().rank() << '\n';
        if (truth) {
            const auto report = evaluate_all(pred.values(), *truth, data.channels(), a.bins);
            write_text(dir / "truth.csv", format_csv(data.slice(last + 1, n_te)));
            write_text(dir / "metrics.json", metrics_json(report));
            files.insert(files.end(), {"truth.csv", "metrics.json"});
            manifest["metrics"] = metrics_summary(report);
            out << "NRMSE = " << fmt(report.nrmse_avg) << ", NAMMAE = " << fmt(report.nammae_avg)
                << ", JSD = " << fmt(report.jsd_avg) << '\n';
        }
        for (const auto& w : forecaster.warnings()) out << "warning: " << w << '\n';
    } else {
        ShdmdConfig config;
        config.n_realizations = a.realizations;
        std::tie(config.ltr_lo, config.ltr_hi) = parse_range(a.ltr_range, "--ltr-range");
        std::tie(config.ld_lo_ratio, config.ld_hi_ratio) = parse_range(a.ld_ratio_range, "--ld-ratio-range");
        config.coverage = a.coverage;
        config.seed = a.seed;
        config.rank_policy = RankPolicy::parse(a.common.rank);
        config.workers = a.common.workers;
        const auto result = shdmd_forecast(data, config, t_ref, t_end, static_cast<double>(n_te) * data.dt());

        write_text(dir / "stochastic.csv", stochastic_csv(result));
        std::ostringstream real;
        real << "index,l_tr,l_d,n_tr,n_d,ok,error\n";
        std::size_t failed = 0;
        for (std::size_t i = 0; i < result.realizations.size(); ++i) {
            const auto& r = result.realizations[i];
            failed += r.ok ? 0 : 1;
            real << i << ',' << format_number(r.params.l_tr) << ',' << format_number(r.params.l_d) << ','
                 << r.params.n_tr << ',' << r.params.n_d << ',' << (r.ok ? 1 : 0) << ",\""
                 << r.error << "\"\n";
        }
        write_text(dir / "realizations.csv", real.str());
        files = {"stochastic.csv", "realizations.csv"};

        const Eigen::VectorXd cov = ensemble_coverage(result, config.coverage);
        manifest["config"] = {{"mode", "stochastic"},
                              {"realizations", config.n_realizations},
                              {"ltr_range", {config.ltr_lo, config.ltr_hi}},
                              {"ld_ratio_range", {config.ld_lo_ratio, config.ld_hi_ratio}},
                              {"coverage", config.coverage},
                              {"seed", config.seed},
                              {"n_te", n_te},
                              {"t_end", t_end},
                              {"bins", a.bins}};
        manifest["ensemble"] = {{"members", result.ensemble_size()},
                                {"failed", failed},
                                {"min_coverage", cov.size() ? cov.minCoeff() : 0.0}};
        out << "ensemble: " << result.ensemble_size() << " members, " << failed << " failed; min coverage "
            << fmt(cov.size() ? cov.minCoeff() : 0.0, 4) << '\n';
        if (truth) {
            const auto report = evaluate_all(result.mean.values(), *truth, data.channels(), a.bins);
            write_text(dir / "truth.csv", format_csv(data.slice(last + 1, n_te)));
            write_text(dir / "metrics.json", metrics_json(report));
            files.insert(files.end(), {"truth.csv", "metrics.json"});
            manifest["metrics"] = metrics_summary(report);
            out << "NRMSE = " << fmt(report.nrmse_avg) << ", NAMMAE = " << fmt(report.nammae_avg)
                << ", JSD = " << fmt(report.jsd_avg) << '\n';
        }
    }
    finish(manifest, dir, files);
    return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    Common common;
    std::vector<double> ltr_levels{1, 2, 4, 8, 16};
    std::vector<double> ld_levels{0.5, 1, 2, 4, 8, 16};
    std::vector<double> lte_levels{1, 2, 4};
    std::size_t instants = 250;
    std::uint64_t seed = 1;
    std::size_t bins = kDefaultJsdBins;
    bool compare = false;
};

void print_levels(std::ostream& out, const char* name, const std::vector<std::size_t>& v) {
    out << name << ':';
    for (auto n : v) out << ' ' << n;
    out << '\n';
}

void print_pooled(std::ostream& out, const std::string& label, const SweepResult& r) {
    for (std::size_t l = 0; l < r.plan.lte_levels.size(); ++l) {
        const auto v = r.pooled(l, "nrmse");
        out << label << "l_te = " << fmt(r.plan.lte_levels[l]) << "T: ";
        if (v.empty()) {
            out << "no successful samples\n";
            continue;
        }
        const auto s = boxplot_stats(v);
        out << "median NRMSE " << fmt(s.median, 4) << " (q1 " << fmt(s.q1, 4) << ", q3 " << fmt(s.q3, 4) << ", n "
            << s.n << ")\n";
    }
}

int cmd_sweep(const SweepArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    auto common = a.common;
    // The harness filters internally so both arms of a comparison see the same raw record.
    const bool filter = !common.no_filter;
    common.no_filter = true;
    auto prep = prepare(common);
    prep.filtered = filter;
    const fs::path dir(a.common.out);
    fs::create_directories(dir);
    const auto period = resolve_period(a.common, prep.raw);

    SweepPlan plan;
    plan.ltr_levels = a.ltr_levels;
    plan.ld_levels = a.ld_levels;
    plan.lte_levels = a.lte_levels;
    plan.n_test_instants = a.instants;
    plan.seed = a.seed;
    plan.filter = filter;
    plan.filter_spec = FilterSpec{a.common.fc, a.common.taps};
    plan.bins = a.bins;
    plan.t_ref = period.t_ref;
    plan.rank_policy = RankPolicy::parse(a.common.rank);
    plan.workers = a.common.workers;
    plan.validate();

    const auto counts = plan_samples(plan, prep.raw.dt());
    out << "reference period T = " << fmt(period.t_ref) << " s\n";
    print_levels(out, "n_tr levels", counts.n_tr);
    print_levels(out, "n_d levels", counts.n_d);
    print_levels(out, "n_te levels", counts.n_te);

    auto manifest = manifest_base("sweep", args, a.common, prep);
    manifest["reference_period"] = period.info;
    manifest["sample_counts"] = {{"n_tr", counts.n_tr}, {"n_d", counts.n_d}, {"n_te", counts.n_te}};
    std::vector<std::string> files;
    auto record = [&](const SweepResult& r, const std::string& prefix) {
        write_sweep(r, dir, prefix);
        for (const char* f : {"sweep.json", "samples.csv", "summary.csv", "boxplot_long.dat"}) {
            files.push_back(prefix + f);
        }
        for (const auto& s : r.skipped_log) out << prefix << s << '\n';
        std::size_t failures = 0;
        for (const auto& s : r.samples) failures += s.report ? 0 : 1;
        if (failures > 0) out << prefix << failures << " failed samples (see " << prefix << "sweep.json)\n";
        return json{{"skipped_cells", r.skipped_log.size()}, {"failed_samples", failures}};
    };

    if (a.compare) {
        const auto pair = compare_filtered_unfiltered(prep.raw, plan);
        manifest["filtered"] = record(pair.filtered, "filtered_");
        manifest["unfiltered"] = record(pair.unfiltered, "unfiltered_");
        print_pooled(out, "filtered   ", pair.filtered);
        print_pooled(out, "unfiltered ", pair.unfiltered);
    } else {
        const auto result = run_sweep(prep.raw, plan);
        manifest["result"] = record(result, "");
        print_pooled(out, "", result);
    }
    finish(manifest, dir, files);
    return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    std::string spec_path;
    bool composite = false;
    std::string kind = "multi_sine";
    std::size_t dimension = 1;
    std::vector<double> freqs;
    std::vector<double> damping;
    std::vector<double> amplitudes;
    double noise = 0.0;
    double duration = 3600.0;
    double dt = 0.1;
    std::uint64_t seed = 7;
    std::string out;
};

json truth_json(const GroundTruth& truth) {
    json eig = json::array();
    for (Eigen::Index k = 0; k < truth.eigenvalues.size(); ++k) {
        eig.push_back({truth.eigenvalues(k).real(), truth.eigenvalues(k).imag()});
    }
    return {{"eigenvalues", eig},
            {"frequencies_hz", truth.frequencies_hz},
            {"nonlinear", truth.nonlinear},
            {"note", truth.note}};
}

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    SynthOutput gen{MultivariateSeries({"x"}, 1.0, Eigen::MatrixXd::Zero(1, 1)),
                    GroundTruth{MultivariateSeries({"x"}, 1.0, Eigen::MatrixXd::Zero(1, 1)), {}, {}, false, {}}};
    json spec_json;
    if (a.composite) {
        CompositeSpec spec;
        spec.duration = a.duration;
        spec.dt = a.dt;
        spec.noise_std = a.noise;
        spec.seed = a.seed;
        gen = generate_composite(spec);
        spec_json = {{"kind", "composite"},
                     {"duration", spec.duration},
                     {"dt", spec.dt},
                     {"noise_std", spec.noise_std},
                     {"seed", spec.seed}};
    } else {
        SynthSpec spec;
        if (!a.spec_path.empty()) {
            spec = synth_spec_from_json(read_text(a.spec_path));
        } else {
            spec.kind = synth_kind_from_string(a.kind);
            spec.dimension = a.dimension;
            spec.frequencies_hz = a.freqs;
            spec.damping = a.damping;
            spec.amplitudes = a.amplitudes;
            spec.noise_std = a.noise;
            spec.duration = a.duration;
            spec.dt = a.dt;
            spec.seed = a.seed;
        }
        gen = generate(spec);
        spec_json = json::parse(synth_spec_json(spec));
        write_text(dir / "spec.json", synth_spec_json(spec));
    }
    write_text(dir / "data.csv", format_csv(gen.series));
    write_text(dir / "clean.csv", format_csv(gen.truth.clean));
    write_text(dir / "truth.json", truth_json(gen.truth).dump(2) + "\n");

    json manifest;
    manifest["tool"] = "hdmd";
    manifest["version"] = HDMD_VERSION;
    manifest["command"] = "synth";
    manifest["argv"] = args;
    manifest["spec"] = spec_json;
    manifest["dataset_id"] = dataset_fingerprint(gen.series);
    std::vector<std::string> files = {"data.csv", "clean.csv", "truth.json"};
    if (!a.composite) files.push_back("spec.json");
    finish(manifest, dir, files);
    out << "wrote " << gen.series.n_channels() << " channels x " << gen.series.n_samples() << " samples to "
        << (dir / "data.csv").string() << '\n';
    return 0;
}

// ----------------------------------------------------------------- replay

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    json m;
    try {
        m = json::parse(read_text(manifest_path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid manifest: ") + e.what(), 0);
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw ValidationError("manifest has no argv list");
    auto argv = m["argv"].get<std::vector<std::string>>();
    bool replaced = false;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--out" && i + 1 < argv.size()) {
            argv[i + 1] = out_dir;
            replaced = true;
        } else if (argv[i].rfind("--out=", 0) == 0) {
            argv[i] = "--out=" + out_dir;
            replaced = true;
        }
    }
    if (!replaced) argv.insert(argv.end(), {"--out", out_dir});
    return run(argv, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hankel dynamic mode decomposition: modal analysis, forecasting and sweeps", "hdmd"};
    app.set_version_flag("--version", HDMD_VERSION);
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* an = app.add_subcommand("analyze", "modal analysis of a record");
    add_common(an, analyze.common);
    an->add_option("--ltr", analyze.ltr, "training length (default: whole record)");
    an->add_option("--ld", analyze.ld, "delay length (s, T or R units)")->capture_default_str();
    an->add_option("--t-end", analyze.t_end, "time of the last analyzed sample");
    an->add_option("--top", analyze.top, "channels listed per mode")->capture_default_str();

    ForecastArgs fc;
    auto* fo = app.add_subcommand("forecast", "deterministic or stochastic forecast");
    add_common(fo, fc.common);
    fo->add_option("--ltr", fc.ltr, "training length")->capture_default_str();
    fo->add_option("--ld", fc.ld, "delay length")->capture_default_str();
    fo->add_option("--lte", fc.lte, "forecast horizon")->capture_default_str();
    fo->add_option("--t-end", fc.t_end, "time of the last training sample (default: leaves one horizon of truth)");
    fo->add_option("--bins", fc.bins, "JSD histogram bins")->capture_default_str();
    fo->add_flag("--stochastic", fc.stochastic, "Monte-Carlo ensemble over sampled hyperparameters");
    fo->add_option("--realizations", fc.realizations, "ensemble size")->capture_default_str();
    fo->add_option("--ltr-range", fc.ltr_range, "l_tr / T range lo:hi")->capture_default_str();
    fo->add_option("--ld-ratio-range", fc.ld_ratio_range, "l_d / l_tr range lo:hi")->capture_default_str();
    fo->add_option("--coverage", fc.coverage, "band half-width in standard deviations")->capture_default_str();
    fo->add_option("--seed", fc.seed, "ensemble seed")->capture_default_str();

    SweepArgs sw;
    auto* sp = app.add_subcommand("sweep", "full-factorial hyperparameter sweep");
    add_common(sp, sw.common);
    sp->add_option("--ltr-levels", sw.ltr_levels, "l_tr levels in T")->delimiter(',')->capture_default_str();
    sp->add_option("--ld-levels", sw.ld_levels, "l_d levels in T")->delimiter(',')->capture_default_str();
    sp->add_option("--lte-levels", sw.lte_levels, "l_te levels in T")->delimiter(',')->capture_default_str();
    sp->add_option("--instants", sw.instants, "random test instants")->capture_default_str();
    sp->add_option("--seed", sw.seed, "test-instant seed")->capture_default_str();
    sp->add_option("--bins", sw.bins, "JSD histogram bins")->capture_default_str();
    sp->add_flag("--compare-filter", sw.compare, "run filtered and unfiltered on the same instants");

    SynthArgs sy;
    auto* sn = app.add_subcommand("synth", "generate a synthetic dataset");
    auto* sg = sn->add_option_group("spec");
    sg->add_option("--spec", sy.spec_path, "JSON spec file");
    sg->add_flag("--composite", sy.composite, "15-channel composite");
    sg->require_option(0, 1);
    sn->add_option("--kind", sy.kind, "linear_lti | multi_sine | latent_scalar | saturating")->capture_default_str();
    sn->add_option("--dimension", sy.dimension, "channels")->capture_default_str();
    sn->add_option("--freqs", sy.freqs, "frequencies [Hz]")->delimiter(',');
    sn->add_option("--damping", sy.damping, "damping rates [1/s]")->delimiter(',');
    sn->add_option("--amps", sy.amplitudes, "amplitudes")->delimiter(',');
    sn->add_option("--noise", sy.noise, "white-noise std")->capture_default_str();
    sn->add_option("--duration", sy.duration, "duration [s]")->capture_default_str();
    sn->add_option("--dt", sy.dt, "sampling interval [s]")->capture_default_str();
    sn->add_option("--seed", sy.seed, "generator seed")->capture_default_str();
    sn->add_option("--out", sy.out, "output directory")->required();

    std::string replay_manifest, replay_out;
    auto* rp = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    rp->add_option("manifest", replay_manifest, "manifest.json of a previous run")->required();
    rp->add_option("--out", replay_out, "output directory")->required();

    std::vector<const char*> argv{"hdmd"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (an->parsed()) return cmd_analyze(analyze, args, out);
        if (fo->parsed()) return cmd_forecast(fc, args, out);
        if (sp->parsed()) return cmd_sweep(sw, args, out);
        if (sn->parsed()) {
            if (!sy.composite && sy.spec_path.empty() && sy.freqs.empty()) {
                throw ValidationError("synth needs --spec, --composite or --freqs");
            }
            return cmd_synth(sy, args, out);
        }
        if (rp->parsed()) return cmd_replay(replay_manifest, replay_out, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace hdmd::cli
