#pragma once

#include "hdmd/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace hdmd {

inline constexpr std::size_t kDefaultJsdBins = 50;

struct ChannelMetric {
    Eigen::VectorXd per_channel;
    double averaged = 0.0;
};

struct MetricsReport {
    std::vector<std::string> channels;
    Eigen::VectorXd nrmse;
    Eigen::VectorXd nammae;
    Eigen::VectorXd jsd;
    double nrmse_avg = 0.0;
    double nammae_avg = 0.0;
    double jsd_avg = 0.0;
    std::size_t window_samples = 0;
    std::size_t bins = kDefaultJsdBins;
};

// All metrics take (prediction, truth) as channels x samples matrices. The
// normalizing sigma is the population std of the truth window per channel.
ChannelMetric nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                    const std::vector<std::string>& channels = {});
ChannelMetric nammae(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                     const std::vector<std::string>& channels = {});
// Jensen-Shannon divergence of shared-edge histograms, natural log.
ChannelMetric jsd(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, std::size_t bins = kDefaultJsdBins);

// Divergence between two discrete distributions (normalized internally).
double jensen_shannon(const Eigen::VectorXd& q, const Eigen::VectorXd& r);

MetricsReport evaluate_all(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                           const std::vector<std::string>& channels, std::size_t bins = kDefaultJsdBins);
MetricsReport evaluate_all(const MultivariateSeries& pred, const MultivariateSeries& truth,
                           std::size_t bins = kDefaultJsdBins);

}  // namespace hdmd
