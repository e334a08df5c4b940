#include "hdmd/modal.hpp"

#include "hdmd/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hdmd {

using Eigen::Index;
using cplx = std::complex<double>;

ConjugateGrouping group_conjugate_pairs(const Eigen::VectorXcd& eigenvalues, double tol) {
    const auto n = static_cast<std::size_t>(eigenvalues.size());
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> partner(n, none);
    std::vector<bool> used(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const cplx li = eigenvalues(static_cast<Index>(i));
        if (used[i] || std::abs(li.imag()) <= tol) continue;
        std::size_t best = none;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || used[j]) continue;
            const cplx lj = eigenvalues(static_cast<Index>(j));
            if (std::abs(lj.imag()) <= tol || (lj.imag() > 0) == (li.imag() > 0)) continue;
            const double dist = std::abs(lj - std::conj(li));
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best != none && best_dist <= tol * std::max(1.0, std::abs(li))) {
            partner[i] = best;
            partner[best] = i;
            used[i] = used[best] = true;
        }
    }

    ConjugateGrouping out;
    out.group_of.assign(n, none);
    for (std::size_t i = 0; i < n; ++i) {
        if (out.group_of[i] != none) continue;
        const std::size_t id = out.groups.size();
        if (partner[i] != none) {
            out.groups.push_back({i, partner[i]});
            out.group_of[partner[i]] = id;
        } else {
            out.groups.push_back({i});
            if (std::abs(eigenvalues(static_cast<Index>(i)).imag()) > tol) out.unmatched.push_back(i);
        }
        out.group_of[i] = id;
    }
    return out;
}

ModalReport modal_energy_ranking(const DmdModel& model, const SnapshotPair& training,
                                 const std::vector<std::string>& channels) {
    training.validate();
    const auto proj = model.project(training.x);
    const Index r = static_cast<Index>(model.rank());

    ModalReport report;
    report.channels = channels;
    report.projection_rank_deficient = proj.rank_deficient;
    if (proj.rank_deficient) report.warnings.push_back("mode basis is rank deficient; minimum-norm projection used");
    if (r == 0) return report;

    Eigen::VectorXd energy(r);
    for (Index k = 0; k < r; ++k) {
        energy(k) = model.modes().col(k).squaredNorm() * proj.coords.row(k).cwiseAbs2().mean();
    }
    const double total = energy.sum();
    if (!(total > 0.0)) throw DegenerateDataError("training snapshots carry no modal energy");
    energy /= total;

    const auto grouping = group_conjugate_pairs(model.eigenvalues());
    for (auto i : grouping.unmatched) {
        report.warnings.push_back("eigenvalue " + std::to_string(i) + " has no conjugate partner");
    }

    const Index block = channels.empty() ? model.modes().rows()
                                         : std::min<Index>(static_cast<Index>(channels.size()), model.modes().rows());
    std::vector<Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return energy(a) > energy(b); });

    report.cumulative_energy.resize(r);
    double running = 0.0;
    for (Index pos = 0; pos < r; ++pos) {
        const Index k = order[static_cast<std::size_t>(pos)];
        ModalEntry e;
        e.mode = static_cast<std::size_t>(k);
        e.eigenvalue = model.eigenvalues()(k);
        e.omega = e.eigenvalue == cplx(0.0, 0.0) ? cplx(-std::numeric_limits<double>::infinity(), 0.0)
                                                 : std::log(e.eigenvalue) / model.dt();
        e.frequency_hz = e.omega.imag() / (2.0 * std::numbers::pi);
        e.period_s = e.frequency_hz != 0.0 ? 1.0 / std::abs(e.frequency_hz) : std::numeric_limits<double>::infinity();
        e.energy = energy(k);
        e.participation = model.modes().col(k).head(block).cwiseAbs();
        e.pair_id = grouping.group_of[static_cast<std::size_t>(k)];
        running += e.energy;
        report.cumulative_energy(pos) = running;
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::string format_modal_table(const ModalReport& report, std::size_t top_channels) {
    std::ostringstream out;
    out << std::left << std::setw(6) << "rank" << std::setw(6) << "mode" << std::setw(6) << "pair" << std::right
        << std::setw(14) << "freq_hz" << std::setw(14) << "period_s" << std::setw(14) << "|lambda|"
        << std::setw(14) << "energy" << "  top_channels\n";
    out << std::setprecision(6);
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        out << std::left << std::setw(6) << i + 1 << std::setw(6) << e.mode << std::setw(6) << e.pair_id
            << std::right << std::setw(14) << e.frequency_hz << std::setw(14) << e.period_s << std::setw(14)
            << std::abs(e.eigenvalue) << std::setw(14) << e.energy << "  ";
        std::vector<Index> idx(static_cast<std::size_t>(e.participation.size()));
        std::iota(idx.begin(), idx.end(), Index{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](Index a, Index b) { return e.participation(a) > e.participation(b); });
        for (std::size_t t = 0; t < std::min(top_channels, idx.size()); ++t) {
            const auto c = static_cast<std::size_t>(idx[t]);
            if (t > 0) out << ',';
            out << (c < report.channels.size() ? report.channels[c] : "x" + std::to_string(c));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace hdmd
