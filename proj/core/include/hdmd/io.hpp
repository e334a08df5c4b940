#pragma once

#include "hdmd/dmd.hpp"
#include "hdmd/harness.hpp"
#include "hdmd/hankel.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/modal.hpp"
#include "hdmd/stochastic.hpp"
#include "hdmd/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace hdmd {

// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

// JSON documents (text, pretty-printed with two-space indent).
// Modes are exported row-major as [re, im] pairs; `rows` keeps only the
// leading state components (the undelayed block of an augmented state).
std::string model_json(const DmdModel& model, std::optional<std::size_t> rows = std::nullopt);
std::string forecaster_json(const HdmdForecaster& forecaster);
std::string metrics_json(const MetricsReport& report);
std::string modal_report_json(const ModalReport& report);
std::string synth_spec_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const std::string& text);

// time, <ch>_mean, <ch>_std, <ch>_lo, <ch>_hi
std::string stochastic_csv(const StochasticForecast& forecast);
// frequency_hz power, one pair per line, after a '#' header.
std::string spectrum_text(const SpectrumPeak& peak);

std::string sweep_manifest_json(const SweepResult& result);
// l_tr,l_d,l_te,instant,nrmse,nammae,jsd (lengths in multiples of t_ref)
std::string sweep_samples_csv(const SweepResult& result);
std::string sweep_summary_csv(const SweepResult& result);
// Long format for external plotting: metric l_te l_tr l_d value
std::string sweep_long_text(const SweepResult& result);
// manifest.json, samples.csv, summary.csv, boxplot_long.dat under dir.
void write_sweep(const SweepResult& result, const std::filesystem::path& dir, const std::string& prefix = "");

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace hdmd
