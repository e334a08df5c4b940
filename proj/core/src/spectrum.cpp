#include "hdmd/error.hpp"
#include "hdmd/modal.hpp"
#include "hdmd/series.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace hdmd {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

}  // namespace

SpectrumPeak welch_spectrum(std::span<const double> x, double dt, const WelchSpec& spec) {
    if (!(dt > 0.0)) throw ValidationError("sample interval must be positive");
    if (!(spec.overlap >= 0.0 && spec.overlap < 1.0)) throw ValidationError("segment overlap must lie in [0, 1)");
    const std::size_t n = x.size();
    std::size_t len = spec.segment_length;
    if (len == 0) {
        if (!(spec.segment_fraction > 0.0 && spec.segment_fraction <= 1.0)) {
            throw ValidationError("segment fraction must lie in (0, 1]");
        }
        len = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.segment_fraction));
    }
    if (len < 4 || len > n) {
        throw ValidationError("Welch segment of " + std::to_string(len) + " samples does not fit a series of " +
                              std::to_string(n));
    }
    const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(len) * (1.0 - spec.overlap))));
    const std::size_t n_freq = len / 2 + 1;

    std::vector<double> window(len);
    double wss = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
        wss += window[i] * window[i];
    }

    std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(len), &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(n_freq), &fftw_free);
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE));
    }
    if (!plan) throw NumericError("FFT planning failed");

    SpectrumPeak result;
    result.segment_length = len;
    result.power = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_freq));
    for (std::size_t start = 0; start + len <= n; start += step) {
        double mean = 0.0;
        for (std::size_t i = 0; i < len; ++i) mean += x[start + i];
        mean /= static_cast<double>(len);
        for (std::size_t i = 0; i < len; ++i) in.get()[i] = (x[start + i] - mean) * window[i];
        fftw_execute(plan.get());
        for (std::size_t k = 0; k < n_freq; ++k) {
            const double re = out.get()[k][0];
            const double im = out.get()[k][1];
            result.power(static_cast<Eigen::Index>(k)) += re * re + im * im;
        }
        ++result.segments;
    }
    // One-sided PSD scaling; the peak location does not depend on it.
    result.power *= dt / (wss * static_cast<double>(result.segments));
    for (std::size_t k = 1; k + 1 < n_freq || (k + 1 == n_freq && len % 2 == 1); ++k) {
        result.power(static_cast<Eigen::Index>(k)) *= 2.0;
    }
    result.frequencies.resize(static_cast<Eigen::Index>(n_freq));
    for (std::size_t k = 0; k < n_freq; ++k) {
        result.frequencies(static_cast<Eigen::Index>(k)) = static_cast<double>(k) / (static_cast<double>(len) * dt);
    }
    return result;
}

SpectrumPeak reference_period(std::span<const double> x, double dt, const WelchSpec& spec) {
    if (x.size() >= 2 && !(population_std(x) > 1e-12 * std::max(1.0, std::abs(population_mean(x))))) {
        throw ValidationError("series is constant; no reference period can be identified");
    }
    SpectrumPeak s = welch_spectrum(x, dt, spec);
    Eigen::Index best = 1;
    for (Eigen::Index k = 2; k < s.power.size(); ++k) {
        if (s.power(k) > s.power(best)) best = k;
    }
    const double total = s.power.tail(s.power.size() - 1).sum();
    if (s.power.size() < 2 || !(s.power(best) > 1e-12 * std::max(total, 1e-300)) || !(total > 0.0)) {
        throw ValidationError("spectrum is flat; no reference period can be identified");
    }
    s.frequency_hz = s.frequencies(best);
    s.period_s = 1.0 / s.frequency_hz;
    return s;
}

}  // namespace hdmd
