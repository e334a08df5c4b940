#include "hdmd/metrics.hpp"

#include "hdmd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hdmd {

using Eigen::Index;

namespace {

void check_shapes(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, Index min_samples) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
        throw ShapeError("prediction is " + std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()) +
                         " but truth is " + std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
    }
    if (pred.rows() < 1) throw ShapeError("metrics need at least one channel");
    if (pred.cols() < min_samples) {
        throw ShapeError("metrics need at least " + std::to_string(min_samples) + " samples");
    }
}

std::string channel_label(const std::vector<std::string>& channels, Index c) {
    if (static_cast<std::size_t>(c) < channels.size()) return "'" + channels[static_cast<std::size_t>(c)] + "'";
    return "#" + std::to_string(c);
}

Eigen::VectorXd truth_sigma(const Eigen::MatrixXd& truth, const std::vector<std::string>& channels) {
    Eigen::VectorXd sigma(truth.rows());
    for (Index c = 0; c < truth.rows(); ++c) {
        const double mean = truth.row(c).mean();
        sigma(c) = std::sqrt((truth.row(c).array() - mean).square().mean());
        if (!(sigma(c) > 0.0)) {
            throw ValidationError("truth channel " + channel_label(channels, c) +
                                  " has zero standard deviation in the evaluation window");
        }
    }
    return sigma;
}

ChannelMetric finish(Eigen::VectorXd per_channel) {
    const double avg = per_channel.mean();
    return ChannelMetric{std::move(per_channel), avg};
}

}  // namespace

ChannelMetric nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                    const std::vector<std::string>& channels) {
    check_shapes(pred, truth, 2);
    const Eigen::VectorXd sigma = truth_sigma(truth, channels);
    Eigen::VectorXd out(pred.rows());
    for (Index c = 0; c < pred.rows(); ++c) {
        out(c) = std::sqrt((pred.row(c) - truth.row(c)).squaredNorm() / static_cast<double>(pred.cols())) / sigma(c);
    }
    return finish(std::move(out));
}

ChannelMetric nammae(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                     const std::vector<std::string>& channels) {
    check_shapes(pred, truth, 2);
    const Eigen::VectorXd sigma = truth_sigma(truth, channels);
    Eigen::VectorXd out(pred.rows());
    for (Index c = 0; c < pred.rows(); ++c) {
        const double dmin = std::abs(pred.row(c).minCoeff() - truth.row(c).minCoeff());
        const double dmax = std::abs(pred.row(c).maxCoeff() - truth.row(c).maxCoeff());
        out(c) = (dmin + dmax) / (2.0 * sigma(c));
    }
    return finish(std::move(out));
}

double jensen_shannon(const Eigen::VectorXd& q_in, const Eigen::VectorXd& r_in) {
    if (q_in.size() != r_in.size() || q_in.size() == 0) throw ShapeError("distributions differ in support size");
    const Eigen::VectorXd q = q_in / q_in.sum();
    const Eigen::VectorXd r = r_in / r_in.sum();
    double d = 0.0;
    for (Index i = 0; i < q.size(); ++i) {
        const double m = 0.5 * (q(i) + r(i));
        if (q(i) > 0.0) d += 0.5 * q(i) * std::log(q(i) / m);
        if (r(i) > 0.0) d += 0.5 * r(i) * std::log(r(i) / m);
    }
    return std::clamp(d, 0.0, std::numbers::ln2);
}

ChannelMetric jsd(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, std::size_t bins) {
    check_shapes(pred, truth, 1);
    if (bins < 2) throw ValidationError("JSD needs at least two bins");
    const auto nb = static_cast<Index>(bins);
    Eigen::VectorXd out(pred.rows());
    for (Index c = 0; c < pred.rows(); ++c) {
        const double lo = std::min(pred.row(c).minCoeff(), truth.row(c).minCoeff());
        const double hi = std::max(pred.row(c).maxCoeff(), truth.row(c).maxCoeff());
        if (!(hi > lo)) {
            out(c) = 0.0;  // both signals sit in one bin
            continue;
        }
        const double scale = static_cast<double>(nb) / (hi - lo);
        auto bin_of = [&](double v) {
            const auto b = static_cast<Index>(std::floor((v - lo) * scale));
            return std::clamp<Index>(b, 0, nb - 1);
        };
        Eigen::VectorXd q = Eigen::VectorXd::Zero(nb);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nb);
        for (Index j = 0; j < pred.cols(); ++j) {
            q(bin_of(pred(c, j))) += 1.0;
            r(bin_of(truth(c, j))) += 1.0;
        }
        out(c) = jensen_shannon(q, r);
    }
    return finish(std::move(out));
}

MetricsReport evaluate_all(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                           const std::vector<std::string>& channels, std::size_t bins) {
    const auto e1 = nrmse(pred, truth, channels);
    const auto e2 = nammae(pred, truth, channels);
    const auto e3 = jsd(pred, truth, bins);
    MetricsReport report;
    report.channels = channels;
    report.nrmse = e1.per_channel;
    report.nammae = e2.per_channel;
    report.jsd = e3.per_channel;
    report.nrmse_avg = e1.averaged;
    report.nammae_avg = e2.averaged;
    report.jsd_avg = e3.averaged;
    report.window_samples = static_cast<std::size_t>(pred.cols());
    report.bins = bins;
    return report;
}

MetricsReport evaluate_all(const MultivariateSeries& pred, const MultivariateSeries& truth, std::size_t bins) {
    return evaluate_all(pred.values(), truth.values(), truth.channels(), bins);
}

}  // namespace hdmd
