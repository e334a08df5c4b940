#include "hdmd/dmd.hpp"

#include "hdmd/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hdmd {

using Eigen::Index;
using cplx = std::complex<double>;

void SnapshotPair::validate() const {
    if (x.rows() != xp.rows() || x.cols() != xp.cols()) {
        throw ShapeError("snapshot matrices differ in shape: X is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", X' is " + std::to_string(xp.rows()) + "x" +
                         std::to_string(xp.cols()));
    }
    if (x.rows() < 1 || x.cols() < 2) {
        throw ShapeError("snapshot matrices need at least one row and two columns, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    if (!(dt > 0.0)) throw ValidationError("snapshot interval must be positive");
    if (!x.allFinite() || !xp.allFinite()) throw ValidationError("snapshot matrices contain non-finite values");
}

SnapshotPair SnapshotPair::from_sequence(const Eigen::MatrixXd& states, double dt) {
    if (states.cols() < 3) throw ShapeError("a snapshot sequence needs at least three states");
    const Index m = states.cols();
    return SnapshotPair{states.leftCols(m - 1), states.rightCols(m - 1), dt};
}

RankPolicy RankPolicy::tolerance(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("rank tolerance must lie in (0, 1)");
    return RankPolicy(Kind::tolerance, tau, 0);
}

RankPolicy RankPolicy::fixed(std::size_t rank) {
    if (rank == 0) throw ValidationError("fixed rank must be at least 1");
    return RankPolicy(Kind::fixed, 0.0, rank);
}

RankPolicy RankPolicy::parse(std::string_view text) {
    if (text == "full") return full();
    auto number = [&](std::string_view body, auto& value) {
        const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
        if (ec != std::errc() || ptr != body.data() + body.size()) {
            throw ValidationError("malformed rank policy '" + std::string(text) + "'");
        }
    };
    if (text.starts_with("tol:")) {
        double tau = 0.0;
        number(text.substr(4), tau);
        return tolerance(tau);
    }
    if (text.starts_with("fixed:")) {
        std::size_t r = 0;
        number(text.substr(6), r);
        return fixed(r);
    }
    throw ValidationError("rank policy must be 'full', 'tol:<tau>' or 'fixed:<r>', got '" +
                          std::string(text) + "'");
}

std::string RankPolicy::to_string() const {
    switch (kind_) {
        case Kind::full:
            return "full";
        case Kind::fixed:
            return "fixed:" + std::to_string(rank_);
        case Kind::tolerance: {
            char buf[32];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, tau_);
            return "tol:" + std::string(buf, ptr);
        }
    }
    return {};
}

std::size_t RankPolicy::select(const Eigen::VectorXd& sigma) const {
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double cut = kind_ == Kind::tolerance ? std::max(tau_ * sigma_max, kSingularValueFloor)
                                                : kSingularValueFloor;
    std::size_t count = 0;
    for (Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cut) ++count;
    }
    return kind_ == Kind::fixed ? std::min(rank_, count) : count;
}

namespace detail {

// Factorization Phi = Q [P; 0] used for every least-squares solve against the
// modes. Q is orthogonal (real when Phi = B W with real B) and P is
// k x rank, decomposed with a complete orthogonal decomposition so rank
// deficiency yields the minimum-norm solution.
class ModeBasis {
public:
    static std::shared_ptr<ModeBasis> from_real_factor(const Eigen::MatrixXd& b, const Eigen::MatrixXcd& w) {
        auto basis = std::make_shared<ModeBasis>();
        basis->real_qr_.emplace(b);
        basis->k_ = std::min(b.rows(), b.cols());
        const Eigen::MatrixXd r =
            basis->real_qr_->matrixQR().topRows(basis->k_).triangularView<Eigen::Upper>();
        basis->init(r.cast<cplx>() * w);
        return basis;
    }

    static std::shared_ptr<ModeBasis> from_modes(const Eigen::MatrixXcd& phi) {
        auto basis = std::make_shared<ModeBasis>();
        basis->complex_qr_.emplace(phi);
        basis->k_ = std::min(phi.rows(), phi.cols());
        const Eigen::MatrixXcd r =
            basis->complex_qr_->matrixQR().topRows(basis->k_).triangularView<Eigen::Upper>();
        basis->init(r);
        return basis;
    }

    Index rank() const { return static_cast<Index>(order_.size()); }
    bool rank_deficient() const { return cod_.rank() < rank(); }

    // Coordinates in factor order (before the energy permutation).
    Eigen::MatrixXcd solve_factor_order(const Eigen::MatrixXd& rhs) const {
        Eigen::MatrixXcd top;
        if (real_qr_) {
            Eigen::MatrixXd t = rhs;
            t.applyOnTheLeft(real_qr_->householderQ().transpose());
            top = t.topRows(k_).cast<cplx>();
        } else {
            Eigen::MatrixXcd t = rhs.cast<cplx>();
            t.applyOnTheLeft(complex_qr_->householderQ().adjoint());
            top = t.topRows(k_);
        }
        if (rank() == 0) return Eigen::MatrixXcd(0, rhs.cols());
        return cod_.solve(top);
    }

    Eigen::MatrixXcd solve(const Eigen::MatrixXd& rhs) const {
        const Eigen::MatrixXcd c = solve_factor_order(rhs);
        Eigen::MatrixXcd out(c.rows(), c.cols());
        for (Index m = 0; m < rank(); ++m) out.row(m) = c.row(order_[static_cast<std::size_t>(m)]);
        return out;
    }

    // Q [Re(M); 0] for a k x n block M, real factor only.
    Eigen::MatrixXd lift_real(const Eigen::MatrixXcd& m, Index rows) const {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows, m.cols());
        y.topRows(k_) = m.real();
        y.applyOnTheLeft(real_qr_->householderQ());
        return y;
    }

    bool has_real_factor() const { return real_qr_.has_value(); }
    const Eigen::MatrixXcd& p() const { return p_; }

    void set_order(std::vector<Index> order) { order_ = std::move(order); }

private:
    void init(const Eigen::MatrixXcd& p) {
        p_ = p;
        order_.resize(static_cast<std::size_t>(p.cols()));
        std::iota(order_.begin(), order_.end(), Index{0});
        if (p.cols() > 0) cod_.compute(p_);
    }

    std::optional<Eigen::HouseholderQR<Eigen::MatrixXd>> real_qr_;
    std::optional<Eigen::HouseholderQR<Eigen::MatrixXcd>> complex_qr_;
    Eigen::MatrixXcd p_;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod_;
    Index k_ = 0;
    std::vector<Index> order_;
};

}  // namespace detail

namespace {

struct SvdFactors {
    Eigen::MatrixXd u;  // rows x r
    Eigen::VectorXd sigma_all;
    Eigen::MatrixXd v;  // cols x r
};

SvdFactors truncated_svd(const Eigen::MatrixXd& x, const RankPolicy& policy) {
    SvdFactors f;
    const Index rows = x.rows();
    const Index cols = x.cols();
    if (rows > cols) {
        // Tall: QR first, then the SVD of the small triangular factor.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
        const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.info() != Eigen::Success) throw NumericError("SVD of the snapshot matrix failed");
        f.sigma_all = svd.singularValues();
        const auto keep = static_cast<Index>(policy.select(f.sigma_all));
        f.u = Eigen::MatrixXd::Zero(rows, keep);
        f.u.topRows(cols) = svd.matrixU().leftCols(keep);
        f.u.applyOnTheLeft(qr.householderQ());
        f.v = svd.matrixV().leftCols(keep);
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success) throw NumericError("SVD of the snapshot matrix failed");
        f.sigma_all = svd.singularValues();
        const auto keep = static_cast<Index>(policy.select(f.sigma_all));
        f.u = svd.matrixU().leftCols(keep);
        f.v = svd.matrixV().leftCols(keep);
    }
    return f;
}

// Descending energy; near-equal energies (conjugate pairs) ordered by
// ascending |arg lambda|, positive imaginary part first.
std::vector<Index> energy_order(const Eigen::VectorXd& energy, const Eigen::VectorXcd& lambda) {
    std::vector<Index> idx(static_cast<std::size_t>(energy.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return energy(a) > energy(b); });

    auto tie_less = [&](Index a, Index b) {
        const double pa = std::abs(std::arg(lambda(a)));
        const double pb = std::abs(std::arg(lambda(b)));
        if (pa != pb) return pa < pb;
        if (lambda(a).imag() != lambda(b).imag()) return lambda(a).imag() > lambda(b).imag();
        return a < b;
    };
    std::size_t start = 0;
    while (start < idx.size()) {
        const double lead = energy(idx[start]);
        std::size_t end = start + 1;
        while (end < idx.size() && energy(idx[end]) >= lead * (1.0 - 1e-9)) ++end;
        std::sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                  idx.begin() + static_cast<std::ptrdiff_t>(end), tie_less);
        start = end;
    }
    return idx;
}

}  // namespace

DmdModel DmdModel::from_modes(Eigen::VectorXcd eigenvalues, Eigen::MatrixXcd modes, double dt) {
    if (modes.cols() != eigenvalues.size()) {
        throw ShapeError("mode matrix has " + std::to_string(modes.cols()) + " columns for " +
                         std::to_string(eigenvalues.size()) + " eigenvalues");
    }
    if (modes.rows() < 1) throw ShapeError("modes need at least one state component");
    if (!(dt > 0.0)) throw ValidationError("model sampling interval must be positive");
    DmdModel model;
    model.eigenvalues_ = std::move(eigenvalues);
    model.modes_ = std::move(modes);
    model.dt_ = dt;
    model.basis_ = detail::ModeBasis::from_modes(model.modes_);
    return model;
}

DmdModel DmdModel::zero(std::size_t state_dim, double dt) {
    auto model = from_modes(Eigen::VectorXcd(0), Eigen::MatrixXcd(static_cast<Index>(state_dim), 0), dt);
    model.amplitudes_ = Eigen::VectorXcd(0);
    model.reconstruction_error_ = 0.0;
    return model;
}

ModeCoordinates DmdModel::project(const Eigen::MatrixXd& states) const {
    if (states.rows() != modes_.rows()) {
        throw ShapeError("state dimension " + std::to_string(states.rows()) + " does not match model (" +
                         std::to_string(modes_.rows()) + ")");
    }
    return ModeCoordinates{basis_->solve(states), basis_->rank_deficient()};
}

DmdModel DmdModel::initialized(const Eigen::VectorXd& x_init) const {
    const auto sol = hdmd::amplitudes(*this, x_init);
    DmdModel copy = *this;
    copy.amplitudes_ = sol.b;
    copy.amplitudes_rank_deficient_ = sol.rank_deficient;
    if (sol.rank_deficient) {
        copy.warnings_.push_back("mode basis is rank deficient; amplitudes are the minimum-norm solution");
    }
    return copy;
}

DmdModel fit_exact_dmd(const SnapshotPair& pair, const RankPolicy& policy) {
    pair.validate();
    const auto& x = pair.x;
    const auto& xp = pair.xp;

    const SvdFactors svd = truncated_svd(x, policy);
    const Index r = svd.u.cols();
    if (r == 0) {
        throw DegenerateDataError("all singular values of the snapshot matrix are below " +
                                  std::to_string(kSingularValueFloor));
    }
    const Eigen::VectorXd inv_sigma = svd.sigma_all.head(r).cwiseInverse();

    // B = X' V Sigma^-1, projected operator A~ = U* B.
    const Eigen::MatrixXd b = xp * (svd.v * inv_sigma.asDiagonal());
    const Eigen::MatrixXd a_tilde = svd.u.transpose() * b;

    Eigen::EigenSolver<Eigen::MatrixXd> eig(a_tilde, true);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of the projected operator did not converge");
    const Eigen::VectorXcd lambda = eig.eigenvalues();
    const Eigen::MatrixXcd w = eig.eigenvectors();

    // Phi = B W with one real product: conjugate eigenvector pairs share
    // their real and imaginary parts.
    Eigen::MatrixXd w_packed(r, r);
    for (Index k = 0; k < r; ++k) {
        if (k + 1 < r && lambda(k).imag() != 0.0 && lambda(k + 1) == std::conj(lambda(k))) {
            w_packed.col(k) = w.col(k).real();
            w_packed.col(k + 1) = w.col(k).imag();
            ++k;
        } else {
            w_packed.col(k) = w.col(k).real();
        }
    }
    const Eigen::MatrixXd bw = b * w_packed;
    Eigen::MatrixXcd phi(b.rows(), r);
    for (Index k = 0; k < r; ++k) {
        if (k + 1 < r && lambda(k).imag() != 0.0 && lambda(k + 1) == std::conj(lambda(k))) {
            phi.col(k).real() = bw.col(k);
            phi.col(k).imag() = bw.col(k + 1);
            phi.col(k + 1) = phi.col(k).conjugate();
            ++k;
        } else {
            phi.col(k).real() = bw.col(k);
            phi.col(k).imag().setZero();
        }
    }

    DmdModel model;
    model.dt_ = pair.dt;
    model.singular_values_ = svd.sigma_all;

    // A zero eigenvalue can give a vanishing exact mode; fall back to the
    // projected mode U w for that column.
    const double col_floor = 1e-12 * std::max(1.0, b.norm());
    bool replaced = false;
    for (Index k = 0; k < r; ++k) {
        if (phi.col(k).norm() <= col_floor) {
            phi.col(k) = svd.u.cast<cplx>() * w.col(k);
            replaced = true;
            model.warnings_.push_back("mode " + std::to_string(k) +
                                      " vanished (eigenvalue ~ 0); using the projected mode");
        }
    }
    if (!phi.allFinite()) throw NumericError("non-finite DMD modes");

    auto basis = replaced ? detail::ModeBasis::from_modes(phi) : detail::ModeBasis::from_real_factor(b, w);

    // Training coordinates of unit-norm modes drive the ordering.
    const Eigen::MatrixXcd coords = basis->solve_factor_order(x);
    Eigen::VectorXd energy(r);
    for (Index k = 0; k < r; ++k) {
        energy(k) = phi.col(k).squaredNorm() * coords.row(k).cwiseAbs2().mean();
    }

    // Reconstruction of X' through the fitted operator.
    const Eigen::MatrixXcd lambda_coords = lambda.asDiagonal() * coords;
    Eigen::MatrixXd recon;
    if (basis->has_real_factor()) {
        recon = basis->lift_real(basis->p() * lambda_coords, x.rows());
    } else {
        recon = (phi * lambda_coords).real();
    }
    const double xp_norm = xp.norm();
    model.reconstruction_error_ = xp_norm > 0.0 ? (xp - recon).norm() / xp_norm : 0.0;

    const auto order = energy_order(energy, lambda);
    model.eigenvalues_.resize(r);
    model.modes_.resize(x.rows(), r);
    model.training_energy_.resize(r);
    for (Index m = 0; m < r; ++m) {
        const Index k = order[static_cast<std::size_t>(m)];
        model.eigenvalues_(m) = lambda(k);
        model.modes_.col(m) = phi.col(k);
        model.training_energy_(m) = energy(k);
    }
    basis->set_order(order);
    model.basis_ = std::move(basis);
    return model;
}

ContinuousSpectrum continuous_eigenvalues(const DmdModel& model) {
    ContinuousSpectrum out;
    std::vector<cplx> omega;
    for (Index k = 0; k < model.eigenvalues().size(); ++k) {
        const cplx lambda = model.eigenvalues()(k);
        if (lambda == cplx(0.0, 0.0)) {
            out.warnings.push_back("mode " + std::to_string(k) +
                                   " has a zero eigenvalue (decays in one step); excluded");
            continue;
        }
        omega.push_back(std::log(lambda) / model.dt());
        out.mode_index.push_back(static_cast<std::size_t>(k));
    }
    out.omega = Eigen::Map<Eigen::VectorXcd>(omega.data(), static_cast<Index>(omega.size()));
    return out;
}

AmplitudeSolution amplitudes(const DmdModel& model, const Eigen::VectorXd& x_init) {
    if (static_cast<std::size_t>(x_init.size()) != model.state_dim()) {
        throw ShapeError("initial state has " + std::to_string(x_init.size()) + " components, model expects " +
                         std::to_string(model.state_dim()));
    }
    const auto proj = model.project(x_init);
    AmplitudeSolution sol;
    sol.b = proj.coords.col(0);
    sol.rank_deficient = proj.rank_deficient;
    sol.residual = (model.modes() * sol.b - x_init.cast<cplx>()).norm();
    return sol;
}

ModalForecast forecast(const DmdModel& model, std::size_t n_steps, std::optional<std::size_t> rows,
                       double growth_guard) {
    if (!model.amplitudes()) throw ValidationError("model has no amplitudes; initialize it first");
    if (n_steps < 1) throw ValidationError("forecast needs at least one step");
    const Index n_rows = static_cast<Index>(rows.value_or(model.state_dim()));
    if (n_rows < 1 || n_rows > static_cast<Index>(model.state_dim())) {
        throw ShapeError("requested " + std::to_string(n_rows) + " forecast rows from a " +
                         std::to_string(model.state_dim()) + "-dimensional model");
    }

    ModalForecast out;
    const Index r = static_cast<Index>(model.rank());
    const auto& lambda = model.eigenvalues();
    for (Index k = 0; k < r; ++k) {
        if (std::abs(lambda(k)) > growth_guard) {
            std::ostringstream msg;
            msg << "mode " << k << " is unstable (|lambda| = " << std::abs(lambda(k))
                << " > " << growth_guard << ")";
            out.warnings.push_back(msg.str());
        }
    }

    const auto steps = static_cast<Index>(n_steps);
    Eigen::MatrixXcd z(r, steps);
    Eigen::VectorXcd current = *model.amplitudes();
    for (Index s = 0; s < steps; ++s) {
        current = lambda.cwiseProduct(current);
        z.col(s) = current;
    }
    const Eigen::MatrixXcd full = model.modes().topRows(n_rows) * z;
    out.states = full.real();
    const double scale = out.states.size() > 0 ? out.states.cwiseAbs().maxCoeff() : 0.0;
    const double imag = full.size() > 0 ? full.imag().cwiseAbs().maxCoeff() : 0.0;
    out.imaginary_residue = scale > 0.0 ? imag / scale : imag;
    return out;
}

}  // namespace hdmd
