#pragma once

#include "hdmd/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hdmd {

enum class SynthKind { linear_lti, multi_sine, latent_scalar, saturating };

std::string to_string(SynthKind kind);
SynthKind synth_kind_from_string(std::string_view name);

struct SynthSpec {
    SynthKind kind = SynthKind::multi_sine;
    std::size_t dimension = 1;
    std::vector<double> frequencies_hz;
    std::vector<double> damping;     // 1/s per frequency; empty = undamped
    std::vector<double> amplitudes;  // per frequency; empty = all ones
    double noise_std = 0.0;
    double duration = 600.0;  // seconds
    double dt = 0.1;
    std::uint64_t seed = 1;
    double saturation = 0.0;  // clip level for `saturating`; 0 = 70% of the amplitude sum
    std::vector<std::string> channel_names;  // empty = x0, x1, ...

    std::size_t n_samples() const;
    void validate() const;
};

struct GroundTruth {
    MultivariateSeries clean;
    Eigen::VectorXcd eigenvalues;  // exact discrete-time spectrum of the generator
    std::vector<double> frequencies_hz;
    bool nonlinear = false;
    std::string note;
};

struct SynthOutput {
    MultivariateSeries series;
    GroundTruth truth;
};

// Deterministic for a given spec (seeded phases, mixing and noise).
SynthOutput generate(const SynthSpec& spec);

// 15-channel composite shaped like a floating-turbine record: four force-like,
// seven motion-like, three saturating turbine-like and one wave-like channel.
// Each clean channel has unit population standard deviation before noise.
struct CompositeSpec {
    double duration = 3600.0;
    double dt = 0.1;
    double noise_std = 0.0;
    std::uint64_t seed = 7;
    double wave_frequency_hz = 0.1367;
};

SynthOutput generate_composite(const CompositeSpec& spec);

}  // namespace hdmd
