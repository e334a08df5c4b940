#include "hdmd/error.hpp"
#include "hdmd/series.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hdmd {

void FilterSpec::validate(double dt) const {
    const double nyquist = 0.5 / dt;
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < nyquist)) {
        std::ostringstream msg;
        msg << "cutoff " << cutoff_hz << " Hz must lie in (0, " << nyquist << ") Hz for dt = " << dt;
        throw ValidationError(msg.str());
    }
    if (taps < 3 || taps % 2 == 0) {
        throw ValidationError("filter length must be odd and at least 3, got " + std::to_string(taps));
    }
}

Eigen::VectorXd design_lowpass(const FilterSpec& spec, double dt) {
    spec.validate(dt);
    const auto n = static_cast<Eigen::Index>(spec.taps);
    const Eigen::Index half = n / 2;
    const double fc = spec.cutoff_hz * dt;  // cycles per sample
    Eigen::VectorXd h(n);
    // Evaluated on one half and mirrored so the kernel is exactly symmetric.
    for (Eigen::Index k = 0; k <= half; ++k) {
        const double m = static_cast<double>(k - half);
        const double sinc = m == 0.0 ? 2.0 * fc
                                     : std::sin(2.0 * std::numbers::pi * fc * m) / (std::numbers::pi * m);
        const double window =
            0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                   static_cast<double>(n - 1));
        h(k) = sinc * window;
        h(n - 1 - k) = h(k);
    }
    h /= h.sum();
    return h;
}

namespace {

// Mirror index without repeating the edge sample: -1 -> 1, n -> n-2.
Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
    if (n == 1) return 0;
    const Eigen::Index period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

}  // namespace

MultivariateSeries lowpass_filter(const MultivariateSeries& series, const FilterSpec& spec) {
    const Eigen::VectorXd h = design_lowpass(spec, series.dt());
    const Eigen::Index half = h.size() / 2;
    const auto& x = series.values();
    const Eigen::Index n = x.cols();

    // Padded copy so the inner loop is a plain dot product.
    Eigen::MatrixXd padded(x.rows(), n + 2 * half);
    for (Eigen::Index j = 0; j < padded.cols(); ++j) padded.col(j) = x.col(reflect(j - half, n));

    Eigen::MatrixXd y(x.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        y.col(j) = padded.middleCols(j, h.size()) * h.reverse();
    }
    return series.with_values(std::move(y));
}

}  // namespace hdmd
