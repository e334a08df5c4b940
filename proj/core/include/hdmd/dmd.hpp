#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hdmd {

// Snapshot matrices X = [x_1 ... x_{m-1}] and X' = [x_2 ... x_m].
struct SnapshotPair {
    Eigen::MatrixXd x;
    Eigen::MatrixXd xp;
    double dt = 1.0;

    void validate() const;
    static SnapshotPair from_sequence(const Eigen::MatrixXd& states, double dt);
};

class RankPolicy {
public:
    enum class Kind { full, tolerance, fixed };

    static RankPolicy full() { return RankPolicy(Kind::full, 0.0, 0); }
    static RankPolicy tolerance(double tau = 1e-10);
    static RankPolicy fixed(std::size_t rank);

    // Accepts "full", "tol:<tau>" or "fixed:<r>".
    static RankPolicy parse(std::string_view text);
    std::string to_string() const;

    Kind kind() const noexcept { return kind_; }
    double tau() const noexcept { return tau_; }
    std::size_t rank() const noexcept { return rank_; }

    // Number of singular values kept; `sigma` is sorted descending.
    std::size_t select(const Eigen::VectorXd& sigma) const;

private:
    RankPolicy(Kind kind, double tau, std::size_t rank) : kind_(kind), tau_(tau), rank_(rank) {}

    Kind kind_;
    double tau_;
    std::size_t rank_;
};

// Singular values at or below this are never kept, whatever the policy.
inline constexpr double kSingularValueFloor = 1e-14;
inline constexpr double kDefaultGrowthGuard = 1.05;

namespace detail {
class ModeBasis;
}

// Least-squares coordinates of a set of states in the mode basis.
struct ModeCoordinates {
    Eigen::MatrixXcd coords;  // rank x n_states
    bool rank_deficient = false;
};

struct AmplitudeSolution {
    Eigen::VectorXcd b;
    double residual = 0.0;  // ||Phi b - x_init||_2
    bool rank_deficient = false;
};

// Fitted linear surrogate x_{j+1} ~ Phi diag(lambda) Phi^+ x_j. Immutable;
// copies share the mode factorization.
class DmdModel {
public:
    // Builds a model from explicit modes; used for imported models and tests.
    static DmdModel from_modes(Eigen::VectorXcd eigenvalues, Eigen::MatrixXcd modes, double dt);

    // Rank-0 model of identically zero data; forecasts zeros.
    static DmdModel zero(std::size_t state_dim, double dt);

    const Eigen::VectorXcd& eigenvalues() const noexcept { return eigenvalues_; }
    const Eigen::MatrixXcd& modes() const noexcept { return modes_; }
    const std::optional<Eigen::VectorXcd>& amplitudes() const noexcept { return amplitudes_; }
    std::size_t rank() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }
    std::size_t state_dim() const noexcept { return static_cast<std::size_t>(modes_.rows()); }
    double dt() const noexcept { return dt_; }

    // Singular values of X (all of them, before truncation); empty for from_modes.
    const Eigen::VectorXd& singular_values() const noexcept { return singular_values_; }
    // ||X' - Re(Phi Lambda Phi^+ X)||_F / ||X'||_F on the training pair; NaN if unknown.
    double reconstruction_error() const noexcept { return reconstruction_error_; }
    // Mean squared modal coordinate of each unit-norm mode over the training
    // snapshots (the ranking key); empty for from_modes.
    const Eigen::VectorXd& training_energy() const noexcept { return training_energy_; }

    bool amplitudes_rank_deficient() const noexcept { return amplitudes_rank_deficient_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    ModeCoordinates project(const Eigen::MatrixXd& states) const;

    // Copy of this model with amplitudes fitted to x_init.
    DmdModel initialized(const Eigen::VectorXd& x_init) const;

private:
    friend DmdModel fit_exact_dmd(const SnapshotPair&, const RankPolicy&);

    DmdModel() = default;

    Eigen::VectorXcd eigenvalues_;
    Eigen::MatrixXcd modes_;
    std::optional<Eigen::VectorXcd> amplitudes_;
    Eigen::VectorXd singular_values_;
    Eigen::VectorXd training_energy_;
    double dt_ = 1.0;
    double reconstruction_error_ = std::numeric_limits<double>::quiet_NaN();
    bool amplitudes_rank_deficient_ = false;
    std::vector<std::string> warnings_;
    std::shared_ptr<const detail::ModeBasis> basis_;
};

// Exact DMD: SVD of X, projected operator U* X' V Sigma^-1, its eigenpairs,
// and modes X' V Sigma^-1 W. Modes are ordered by descending training energy,
// ties broken by ascending |Im omega|.
DmdModel fit_exact_dmd(const SnapshotPair& pair, const RankPolicy& policy = RankPolicy::tolerance());

struct ContinuousSpectrum {
    Eigen::VectorXcd omega;               // ln(lambda) / dt
    std::vector<std::size_t> mode_index;  // model mode of each entry
    std::vector<std::string> warnings;
};

ContinuousSpectrum continuous_eigenvalues(const DmdModel& model);

AmplitudeSolution amplitudes(const DmdModel& model, const Eigen::VectorXd& x_init);

struct ModalForecast {
    Eigen::MatrixXd states;  // rows x n_steps; column s-1 is s steps ahead
    double imaginary_residue = 0.0;
    std::vector<std::string> warnings;
};

// Re(Phi diag(lambda^s) b) for s = 1..n_steps. When `rows` is given only the
// leading `rows` state components are propagated.
ModalForecast forecast(const DmdModel& model, std::size_t n_steps,
                       std::optional<std::size_t> rows = std::nullopt,
                       double growth_guard = kDefaultGrowthGuard);

}  // namespace hdmd
