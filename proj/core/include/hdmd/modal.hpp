#pragma once

#include "hdmd/dmd.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hdmd {

struct ConjugateGrouping {
    std::vector<std::vector<std::size_t>> groups;  // ordered by first member
    std::vector<std::size_t> group_of;             // eigenvalue -> group
    std::vector<std::size_t> unmatched;            // complex eigenvalues without a conjugate
};

// Pairs each eigenvalue with |Im| > tol to its nearest conjugate; real
// eigenvalues and unmatched complex ones become singletons.
ConjugateGrouping group_conjugate_pairs(const Eigen::VectorXcd& eigenvalues, double tol = 1e-9);

struct ModalEntry {
    std::size_t mode = 0;  // column in the model
    std::complex<double> eigenvalue;
    std::complex<double> omega;  // continuous-time eigenvalue, 1/s
    double frequency_hz = 0.0;   // Im(omega) / 2 pi
    double period_s = 0.0;       // 1 / |f|, infinity for non-oscillatory modes
    double energy = 0.0;         // normalized, sums to one over modes
    Eigen::VectorXd participation;  // |phi_k| per channel
    std::size_t pair_id = 0;
};

struct ModalReport {
    std::vector<ModalEntry> entries;  // non-increasing energy
    Eigen::VectorXd cumulative_energy;
    std::vector<std::string> channels;
    bool projection_rank_deficient = false;
    std::vector<std::string> warnings;
};

// Ranks modes by the mean squared modal coordinate of each unit-norm mode,
// where coordinates are least-squares projections of the training snapshots.
// Participation covers the leading channels.size() state components (the
// undelayed block of an augmented state), or the whole state when empty.
ModalReport modal_energy_ranking(const DmdModel& model, const SnapshotPair& training,
                                 const std::vector<std::string>& channels = {});

struct WelchSpec {
    double segment_fraction = 0.125;  // segment length as a fraction of the series
    std::size_t segment_length = 0;   // overrides the fraction when non-zero
    double overlap = 0.5;
};

struct SpectrumPeak {
    double frequency_hz = 0.0;
    double period_s = 0.0;
    Eigen::VectorXd frequencies;
    Eigen::VectorXd power;
    std::size_t segment_length = 0;
    std::size_t segments = 0;

    double resolution_hz() const noexcept { return frequencies.size() > 1 ? frequencies(1) - frequencies(0) : 0.0; }
};

// Hann-windowed, mean-removed Welch periodogram (one-sided power spectral density).
SpectrumPeak welch_spectrum(std::span<const double> x, double dt, const WelchSpec& spec = {});

// Reference period from the spectral peak over f > 0.
SpectrumPeak reference_period(std::span<const double> x, double dt, const WelchSpec& spec = {});

// Plain-text table: rank, frequency, period, energy, top channels.
std::string format_modal_table(const ModalReport& report, std::size_t top_channels = 3);

}  // namespace hdmd
