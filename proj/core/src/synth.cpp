#include "hdmd/synth.hpp"

#include "hdmd/error.hpp"
#include "hdmd/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hdmd {

using Eigen::Index;
using cplx = std::complex<double>;

std::string to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::linear_lti: return "linear_lti";
        case SynthKind::multi_sine: return "multi_sine";
        case SynthKind::latent_scalar: return "latent_scalar";
        case SynthKind::saturating: return "saturating";
    }
    return "unknown";
}

SynthKind synth_kind_from_string(std::string_view name) {
    if (name == "linear_lti") return SynthKind::linear_lti;
    if (name == "multi_sine") return SynthKind::multi_sine;
    if (name == "latent_scalar") return SynthKind::latent_scalar;
    if (name == "saturating") return SynthKind::saturating;
    throw ValidationError("unknown synthetic system kind '" + std::string(name) + "'");
}

std::size_t SynthSpec::n_samples() const {
    return static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
}

void SynthSpec::validate() const {
    if (!(dt > 0.0)) throw ValidationError("synthetic dt must be positive");
    if (!(duration > 0.0) || n_samples() < 16) throw ValidationError("synthetic record needs at least 16 samples");
    if (!(noise_std >= 0.0)) throw ValidationError("noise std must be non-negative");
    if (frequencies_hz.empty()) throw ValidationError("synthetic system needs at least one frequency");
    const double nyquist = 0.5 / dt;
    for (double f : frequencies_hz) {
        if (!(f >= 0.0 && f < nyquist)) {
            std::ostringstream msg;
            msg << "frequency " << f << " Hz outside [0, " << nyquist << ") Hz";
            throw ValidationError(msg.str());
        }
    }
    if (!damping.empty() && damping.size() != frequencies_hz.size()) {
        throw ValidationError("damping list must match the frequency list");
    }
    if (!amplitudes.empty() && amplitudes.size() != frequencies_hz.size()) {
        throw ValidationError("amplitude list must match the frequency list");
    }
    if (kind == SynthKind::latent_scalar && dimension != 1) {
        throw ValidationError("latent_scalar systems have exactly one channel");
    }
    if (dimension < 1) throw ValidationError("dimension must be at least 1");
    if (kind == SynthKind::linear_lti) {
        std::size_t dim = 0;
        for (double f : frequencies_hz) dim += f > 0.0 ? 2 : 1;
        if (dim != dimension) {
            throw ValidationError("linear_lti dimension " + std::to_string(dimension) +
                                  " does not match the " + std::to_string(dim) + " implied by the frequencies");
        }
    }
    if (!channel_names.empty() && channel_names.size() != dimension) {
        throw ValidationError("channel name list must match the dimension");
    }
    if (!(saturation >= 0.0)) throw ValidationError("saturation level must be non-negative");
}

namespace {

std::vector<std::string> names_for(const SynthSpec& spec) {
    if (!spec.channel_names.empty()) return spec.channel_names;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < spec.dimension; ++c) names.push_back("x" + std::to_string(c));
    return names;
}

Eigen::VectorXcd sine_spectrum(const SynthSpec& spec) {
    std::vector<cplx> eig;
    for (std::size_t k = 0; k < spec.frequencies_hz.size(); ++k) {
        const double d = spec.damping.empty() ? 0.0 : spec.damping[k];
        const double w = 2.0 * std::numbers::pi * spec.frequencies_hz[k];
        if (w > 0.0) {
            eig.push_back(std::exp(cplx(-d, w) * spec.dt));
            eig.push_back(std::exp(cplx(-d, -w) * spec.dt));
        } else {
            eig.push_back(std::exp(cplx(-d, 0.0) * spec.dt));
        }
    }
    return Eigen::Map<Eigen::VectorXcd>(eig.data(), static_cast<Index>(eig.size()));
}

Eigen::MatrixXd sines(const SynthSpec& spec, SeededRng& rng) {
    const auto n = static_cast<Index>(spec.n_samples());
    const auto dim = static_cast<Index>(spec.dimension);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, n);
    for (Index c = 0; c < dim; ++c) {
        for (std::size_t k = 0; k < spec.frequencies_hz.size(); ++k) {
            const double a = spec.amplitudes.empty() ? 1.0 : spec.amplitudes[k];
            const double d = spec.damping.empty() ? 0.0 : spec.damping[k];
            const double w = 2.0 * std::numbers::pi * spec.frequencies_hz[k];
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (Index j = 0; j < n; ++j) {
                const double t = static_cast<double>(j) * spec.dt;
                x(c, j) += a * std::exp(-d * t) * std::sin(w * t + phase);
            }
        }
    }
    return x;
}

Eigen::MatrixXd linear_lti(const SynthSpec& spec, SeededRng& rng) {
    const auto dim = static_cast<Index>(spec.dimension);
    Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(dim);
    Index pos = 0;
    for (std::size_t k = 0; k < spec.frequencies_hz.size(); ++k) {
        const double a = spec.amplitudes.empty() ? 1.0 : spec.amplitudes[k];
        const double d = spec.damping.empty() ? 0.0 : spec.damping[k];
        const double w = 2.0 * std::numbers::pi * spec.frequencies_hz[k] * spec.dt;
        const double rho = std::exp(-d * spec.dt);
        if (spec.frequencies_hz[k] > 0.0) {
            blocks(pos, pos) = rho * std::cos(w);
            blocks(pos, pos + 1) = -rho * std::sin(w);
            blocks(pos + 1, pos) = rho * std::sin(w);
            blocks(pos + 1, pos + 1) = rho * std::cos(w);
            z0(pos) = a;
            pos += 2;
        } else {
            blocks(pos, pos) = rho;
            z0(pos) = a;
            pos += 1;
        }
    }
    // Random orthogonal change of basis mixes the modes across channels.
    Eigen::MatrixXd g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
    }
    const Eigen::MatrixXd s = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const Eigen::MatrixXd a_true = s * blocks * s.transpose();

    const auto n = static_cast<Index>(spec.n_samples());
    Eigen::MatrixXd x(dim, n);
    x.col(0) = s * z0;
    for (Index j = 1; j < n; ++j) x.col(j) = a_true * x.col(j - 1);
    return x;
}

}  // namespace

SynthOutput generate(const SynthSpec& spec) {
    spec.validate();
    SeededRng rng(spec.seed);

    Eigen::MatrixXd clean;
    bool nonlinear = false;
    std::string note;
    switch (spec.kind) {
        case SynthKind::linear_lti:
            clean = linear_lti(spec, rng);
            note = "noise-free linear time-invariant system";
            break;
        case SynthKind::multi_sine:
        case SynthKind::latent_scalar:
            clean = sines(spec, rng);
            note = "superposed sinusoids";
            break;
        case SynthKind::saturating: {
            clean = sines(spec, rng);
            double level = spec.saturation;
            if (level == 0.0) {
                double sum = 0.0;
                for (std::size_t k = 0; k < spec.frequencies_hz.size(); ++k) {
                    sum += spec.amplitudes.empty() ? 1.0 : std::abs(spec.amplitudes[k]);
                }
                level = 0.7 * sum;
            }
            clean = clean.cwiseMax(-level).cwiseMin(level);
            nonlinear = true;
            note = "nonlinear - reduced predictability expected";
            break;
        }
    }

    Eigen::MatrixXd noisy = clean;
    if (spec.noise_std > 0.0) {
        for (Index j = 0; j < noisy.cols(); ++j) {
            for (Index c = 0; c < noisy.rows(); ++c) noisy(c, j) += spec.noise_std * rng.normal();
        }
    }

    const auto names = names_for(spec);
    GroundTruth truth{MultivariateSeries(names, spec.dt, clean), sine_spectrum(spec), spec.frequencies_hz,
                      nonlinear, note};
    return SynthOutput{MultivariateSeries(names, spec.dt, std::move(noisy)), std::move(truth)};
}

SynthOutput generate_composite(const CompositeSpec& spec) {
    if (!(spec.dt > 0.0) || !(spec.duration / spec.dt >= 16.0)) {
        throw ValidationError("composite record needs dt > 0 and at least 16 samples");
    }
    if (!(spec.noise_std >= 0.0)) throw ValidationError("noise std must be non-negative");
    const double fw = spec.wave_frequency_hz;
    // Incommensurate companions of the wave frequency.
    const std::vector<double> freqs = {fw, 0.4477 * fw, 1.6761 * fw, 0.1587 * fw, 2.5409 * fw};
    for (double f : freqs) {
        if (!(f < 0.5 / spec.dt)) throw ValidationError("composite frequencies exceed the Nyquist frequency");
    }

    const std::vector<std::string> names = {"T1",   "T2",    "T3",  "T4",    "surge",       "sway",
                                            "heave", "roll", "pitch", "yaw", "nacelle_acc", "power",
                                            "rotor_speed", "blade_pitch", "wave"};
    // Relative weight of each frequency per channel group.
    const std::vector<std::vector<double>> group_weights = {
        {1.0, 0.5, 0.4, 0.3, 0.15},   // force-like
        {1.0, 0.7, 0.3, 0.5, 0.10},   // motion-like
        {0.6, 0.4, 0.2, 1.0, 0.05},   // turbine-like
        {1.0, 0.1, 0.3, 0.0, 0.05},   // wave
    };
    auto group_of = [](std::size_t c) -> std::size_t {
        if (c < 4) return 0;
        if (c < 11) return 1;
        if (c < 14) return 2;
        return 3;
    };

    SeededRng rng(spec.seed);
    const auto n = static_cast<Index>(std::floor(spec.duration / spec.dt + 1e-9));
    const auto dim = static_cast<Index>(names.size());
    Eigen::MatrixXd clean = Eigen::MatrixXd::Zero(dim, n);
    for (Index c = 0; c < dim; ++c) {
        const auto& w = group_weights[group_of(static_cast<std::size_t>(c))];
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            const double gain = w[k] * rng.uniform(0.6, 1.0);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double omega = 2.0 * std::numbers::pi * freqs[k];
            for (Index j = 0; j < n; ++j) {
                clean(c, j) += gain * std::sin(omega * static_cast<double>(j) * spec.dt + phase);
            }
        }
        if (group_of(static_cast<std::size_t>(c)) == 2) {
            // Controller saturation of power / speed / pitch.
            const double level = 0.6 * clean.row(c).cwiseAbs().maxCoeff();
            clean.row(c) = clean.row(c).cwiseMax(-level).cwiseMin(level);
        }
        const double mean = clean.row(c).mean();
        const double sd = std::sqrt((clean.row(c).array() - mean).square().mean());
        clean.row(c) /= sd;
    }

    Eigen::MatrixXd noisy = clean;
    if (spec.noise_std > 0.0) {
        for (Index j = 0; j < n; ++j) {
            for (Index c = 0; c < dim; ++c) noisy(c, j) += spec.noise_std * rng.normal();
        }
    }

    std::vector<cplx> eig;
    for (double f : freqs) {
        const double w = 2.0 * std::numbers::pi * f * spec.dt;
        eig.push_back(std::polar(1.0, w));
        eig.push_back(std::polar(1.0, -w));
    }
    GroundTruth truth{MultivariateSeries(names, spec.dt, clean),
                      Eigen::Map<Eigen::VectorXcd>(eig.data(), static_cast<Index>(eig.size())), freqs, true,
                      "quasi-periodic composite; turbine-like channels saturate"};
    return SynthOutput{MultivariateSeries(names, spec.dt, std::move(noisy)), std::move(truth)};
}

}  // namespace hdmd
