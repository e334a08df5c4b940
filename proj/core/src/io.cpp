#include "hdmd/io.hpp"

#include "hdmd/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace hdmd {

using json = nlohmann::ordered_json;
using Eigen::Index;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_list(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Index k = 0; k < v.size(); ++k) out.push_back(json::array({number(v(k).real()), number(v(k).imag())}));
    return out;
}

json vector_list(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Index k = 0; k < v.size(); ++k) out.push_back(number(v(k)));
    return out;
}

json model_object(const DmdModel& model, std::optional<std::size_t> rows = std::nullopt) {
    json j;
    j["dt"] = model.dt();
    j["rank"] = model.rank();
    j["state_dim"] = model.state_dim();
    j["eigenvalues"] = complex_list(model.eigenvalues());
    // Row-major list of [re, im] pairs.
    const Index n_rows =
        rows ? std::min(static_cast<Index>(*rows), model.modes().rows()) : model.modes().rows();
    j["mode_rows"] = n_rows;
    json modes = json::array();
    for (Index r = 0; r < n_rows; ++r) {
        json row = json::array();
        for (Index c = 0; c < model.modes().cols(); ++c) {
            row.push_back(json::array({number(model.modes()(r, c).real()), number(model.modes()(r, c).imag())}));
        }
        modes.push_back(std::move(row));
    }
    j["modes"] = std::move(modes);
    j["amplitudes"] = model.amplitudes() ? complex_list(*model.amplitudes()) : json(nullptr);
    j["singular_values"] = vector_list(model.singular_values());
    j["recon_error"] = number(model.reconstruction_error());
    j["warnings"] = model.warnings();
    return j;
}

std::string csv_header(const std::vector<std::string>& channels, std::initializer_list<const char*> suffixes) {
    std::string out = "time";
    for (const auto& c : channels) {
        for (const char* s : suffixes) out += "," + c + s;
    }
    return out + "\n";
}

json plan_object(const SweepPlan& plan) {
    json j;
    j["ltr_levels"] = plan.ltr_levels;
    j["ld_levels"] = plan.ld_levels;
    j["lte_levels"] = plan.lte_levels;
    j["n_test_instants"] = plan.n_test_instants;
    j["seed"] = plan.seed;
    j["filter"] = plan.filter;
    j["filter_cutoff_hz"] = plan.filter_spec.cutoff_hz;
    j["filter_taps"] = plan.filter_spec.taps;
    j["bins"] = plan.bins;
    j["t_ref"] = plan.t_ref;
    j["rank_policy"] = plan.rank_policy.to_string();
    return j;
}

void stats_row(std::ostringstream& out, const std::optional<BoxplotStats>& s) {
    if (!s) {
        out << ",,,,,,";
        return;
    }
    out << ',' << format_number(s->q1) << ',' << format_number(s->median) << ',' << format_number(s->q3) << ','
        << format_number(s->whisker_lo) << ',' << format_number(s->whisker_hi) << ',' << s->n_outliers;
}

}  // namespace

std::string model_json(const DmdModel& model, std::optional<std::size_t> rows) {
    return model_object(model, rows).dump(2) + "\n";
}

std::string forecaster_json(const HdmdForecaster& forecaster) {
    json j;
    j["channels"] = forecaster.channels();
    j["n_tr"] = forecaster.config().n_tr;
    j["n_d"] = forecaster.config().n_d;
    j["rank_policy"] = forecaster.config().rank_policy.to_string();
    j["t_end"] = forecaster.t_end();
    j["zscore"] = {{"mean", vector_list(forecaster.stats().mean)}, {"std", vector_list(forecaster.stats().stddev)}};
    j["model"] = model_object(forecaster.model(), forecaster.n_channels());
    j["warnings"] = forecaster.warnings();
    return j.dump(2) + "\n";
}

std::string metrics_json(const MetricsReport& report) {
    json j;
    j["channels"] = report.channels;
    j["per_channel"] = {{"nrmse", vector_list(report.nrmse)},
                        {"nammae", vector_list(report.nammae)},
                        {"jsd", vector_list(report.jsd)}};
    j["averaged"] = {{"nrmse", number(report.nrmse_avg)},
                     {"nammae", number(report.nammae_avg)},
                     {"jsd", number(report.jsd_avg)}};
    j["window_samples"] = report.window_samples;
    j["bins"] = report.bins;
    return j.dump(2) + "\n";
}

std::string modal_report_json(const ModalReport& report) {
    json j;
    j["channels"] = report.channels;
    json entries = json::array();
    for (std::size_t k = 0; k < report.entries.size(); ++k) {
        const auto& e = report.entries[k];
        entries.push_back({{"rank", k + 1},
                           {"mode", e.mode},
                           {"pair_id", e.pair_id},
                           {"eigenvalue", {number(e.eigenvalue.real()), number(e.eigenvalue.imag())}},
                           {"omega", {number(e.omega.real()), number(e.omega.imag())}},
                           {"frequency_hz", number(e.frequency_hz)},
                           {"period_s", number(e.period_s)},
                           {"energy", number(e.energy)},
                           {"cumulative_energy", number(report.cumulative_energy(static_cast<Index>(k)))},
                           {"participation", vector_list(e.participation)}});
    }
    j["modes"] = std::move(entries);
    j["projection_rank_deficient"] = report.projection_rank_deficient;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

std::string synth_spec_json(const SynthSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["dimension"] = spec.dimension;
    j["frequencies_hz"] = spec.frequencies_hz;
    j["damping"] = spec.damping;
    j["amplitudes"] = spec.amplitudes;
    j["noise_std"] = spec.noise_std;
    j["duration"] = spec.duration;
    j["dt"] = spec.dt;
    j["seed"] = spec.seed;
    j["saturation"] = spec.saturation;
    j["channel_names"] = spec.channel_names;
    return j.dump(2) + "\n";
}

SynthSpec synth_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid synthetic spec JSON: ") + e.what(), 0);
    }
    if (!j.is_object()) throw ValidationError("synthetic spec must be a JSON object");
    static const std::array<const char*, 11> known = {"kind",       "dimension", "frequencies_hz", "damping",
                                                      "amplitudes", "noise_std", "duration",       "dt",
                                                      "seed",       "saturation", "channel_names"};
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
            throw ValidationError("unknown synthetic spec field '" + key + "'");
        }
    }
    SynthSpec spec;
    try {
        if (j.contains("kind")) spec.kind = synth_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("dimension")) spec.dimension = j.at("dimension").get<std::size_t>();
        if (j.contains("frequencies_hz")) spec.frequencies_hz = j.at("frequencies_hz").get<std::vector<double>>();
        if (j.contains("damping")) spec.damping = j.at("damping").get<std::vector<double>>();
        if (j.contains("amplitudes")) spec.amplitudes = j.at("amplitudes").get<std::vector<double>>();
        if (j.contains("noise_std")) spec.noise_std = j.at("noise_std").get<double>();
        if (j.contains("duration")) spec.duration = j.at("duration").get<double>();
        if (j.contains("dt")) spec.dt = j.at("dt").get<double>();
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("saturation")) spec.saturation = j.at("saturation").get<double>();
        if (j.contains("channel_names")) spec.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed synthetic spec field: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string stochastic_csv(const StochasticForecast& forecast) {
    const auto& mean = forecast.mean;
    std::ostringstream out;
    out << csv_header(mean.channels(), {"_mean", "_std", "_lo", "_hi"});
    for (std::size_t j = 0; j < mean.n_samples(); ++j) {
        const auto col = static_cast<Index>(j);
        out << format_number(mean.time(j));
        for (Index c = 0; c < mean.values().rows(); ++c) {
            out << ',' << format_number(mean.values()(c, col)) << ',' << format_number(forecast.stddev(c, col)) << ','
                << format_number(forecast.band.lower(c, col)) << ',' << format_number(forecast.band.upper(c, col));
        }
        out << '\n';
    }
    return out.str();
}

std::string spectrum_text(const SpectrumPeak& peak) {
    std::ostringstream out;
    out << "# frequency_hz power (peak " << format_number(peak.frequency_hz) << " Hz, period "
        << format_number(peak.period_s) << " s)\n";
    for (Index k = 0; k < peak.frequencies.size(); ++k) {
        out << format_number(peak.frequencies(k)) << ' ' << format_number(peak.power(k)) << '\n';
    }
    return out.str();
}

std::string sweep_manifest_json(const SweepResult& result) {
    json j;
    j["dataset_id"] = result.dataset_id;
    j["dt"] = result.dt;
    j["channels"] = result.channels;
    j["plan"] = plan_object(result.plan);
    json counts;
    std::vector<std::size_t> n_tr, n_d;
    for (std::size_t i = 0; i < result.plan.ltr_levels.size(); ++i) {
        n_tr.push_back(result.cells[i * result.plan.ld_levels.size()].n_tr);
    }
    for (std::size_t k = 0; k < result.plan.ld_levels.size(); ++k) n_d.push_back(result.cells[k].n_d);
    counts["n_tr"] = n_tr;
    counts["n_d"] = n_d;
    counts["n_te"] = result.n_te;
    j["sample_counts"] = std::move(counts);
    j["instants"] = result.instants;
    j["skipped"] = result.skipped_log;
    std::size_t failures = 0;
    json failure_log = json::array();
    for (const auto& s : result.samples) {
        if (s.report) continue;
        ++failures;
        if (failure_log.size() < 100) {
            failure_log.push_back({{"cell", s.cell}, {"instant", s.instant}, {"lte", s.lte}, {"error", s.error}});
        }
    }
    j["n_samples"] = result.samples.size();
    j["n_failures"] = failures;
    j["failures"] = std::move(failure_log);
    return j.dump(2) + "\n";
}

std::string sweep_samples_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "l_tr,l_d,l_te,instant,nrmse,nammae,jsd\n";
    for (const auto& s : result.samples) {
        const auto& cell = result.cells[s.cell];
        out << format_number(cell.l_tr) << ',' << format_number(cell.l_d) << ','
            << format_number(result.plan.lte_levels[s.lte]) << ',' << format_number(result.instant_times[s.instant]);
        if (s.report) {
            out << ',' << format_number(s.report->nrmse_avg) << ',' << format_number(s.report->nammae_avg) << ','
                << format_number(s.report->jsd_avg);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
    return out.str();
}

std::string sweep_summary_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "l_tr,l_d,l_te,n_tr,n_d,n_te,n_ok,n_failures";
    for (const char* m : {"nrmse", "nammae", "jsd"}) {
        for (const char* f : {"q1", "median", "q3", "whisker_lo", "whisker_hi", "outliers"}) out << ',' << m << '_' << f;
    }
    out << '\n';
    for (const auto& s : result.summaries) {
        const auto& cell = result.cells[s.cell];
        out << format_number(cell.l_tr) << ',' << format_number(cell.l_d) << ','
            << format_number(result.plan.lte_levels[s.lte]) << ',' << cell.n_tr << ',' << cell.n_d << ','
            << result.n_te[s.lte] << ',' << result.instants.size() - s.n_failures << ',' << s.n_failures;
        stats_row(out, s.nrmse);
        stats_row(out, s.nammae);
        stats_row(out, s.jsd);
        out << '\n';
    }
    return out.str();
}

std::string sweep_long_text(const SweepResult& result) {
    std::ostringstream out;
    out << "# metric l_te l_tr l_d value\n";
    for (const char* metric : {"nrmse", "nammae", "jsd"}) {
        for (const auto& s : result.samples) {
            if (!s.report) continue;
            const auto& cell = result.cells[s.cell];
            const double v = std::string(metric) == "nrmse"    ? s.report->nrmse_avg
                             : std::string(metric) == "nammae" ? s.report->nammae_avg
                                                               : s.report->jsd_avg;
            out << metric << ' ' << format_number(result.plan.lte_levels[s.lte]) << ' ' << format_number(cell.l_tr)
                << ' ' << format_number(cell.l_d) << ' ' << format_number(v) << '\n';
        }
    }
    return out.str();
}

void write_sweep(const SweepResult& result, const std::filesystem::path& dir, const std::string& prefix) {
    std::filesystem::create_directories(dir);
    write_text(dir / (prefix + "sweep.json"), sweep_manifest_json(result));
    write_text(dir / (prefix + "samples.csv"), sweep_samples_csv(result));
    write_text(dir / (prefix + "summary.csv"), sweep_summary_csv(result));
    write_text(dir / (prefix + "boxplot_long.dat"), sweep_long_text(result));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace hdmd
