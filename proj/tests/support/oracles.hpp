#pragma once

// Straight-loop reference implementations used to cross-check the library.
// They deliberately avoid the library and Eigen's vectorized paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;  // [channel][sample]

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double pop_std(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
}

inline std::vector<double> nrmse(const Rows& pred, const Rows& truth) {
    std::vector<double> out;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double sigma = pop_std(truth[i]);
        double s = 0.0;
        for (std::size_t j = 0; j < truth[i].size(); ++j) s += (pred[i][j] - truth[i][j]) * (pred[i][j] - truth[i][j]);
        out.push_back(std::sqrt(s / (static_cast<double>(truth[i].size()) * sigma * sigma)));
    }
    return out;
}

inline std::vector<double> nammae(const Rows& pred, const Rows& truth) {
    std::vector<double> out;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double pmin = pred[i][0], pmax = pred[i][0], tmin = truth[i][0], tmax = truth[i][0];
        for (std::size_t j = 1; j < truth[i].size(); ++j) {
            pmin = std::min(pmin, pred[i][j]);
            pmax = std::max(pmax, pred[i][j]);
            tmin = std::min(tmin, truth[i][j]);
            tmax = std::max(tmax, truth[i][j]);
        }
        out.push_back((std::abs(pmin - tmin) + std::abs(pmax - tmax)) / (2.0 * pop_std(truth[i])));
    }
    return out;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& m) {
    double d = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] > 0.0) d += p[k] * std::log(p[k] / m[k]);
    }
    return d;
}

inline double js(std::vector<double> q, std::vector<double> r) {
    double sq = 0.0, sr = 0.0;
    for (double v : q) sq += v;
    for (double v : r) sr += v;
    for (auto& v : q) v /= sq;
    for (auto& v : r) v /= sr;
    std::vector<double> m(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) m[k] = 0.5 * (q[k] + r[k]);
    return 0.5 * kl(q, m) + 0.5 * kl(r, m);
}

// Histogram with explicit edges; the last bin is closed on the right.
inline std::vector<double> histogram(const std::vector<double>& x, const std::vector<double>& edges) {
    std::vector<double> h(edges.size() - 1, 0.0);
    for (double v : x) {
        std::size_t b = h.size() - 1;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            if (v >= edges[k] && v < edges[k + 1]) {
                b = k;
                break;
            }
        }
        h[b] += 1.0;
    }
    return h;
}

inline std::vector<double> jsd(const Rows& pred, const Rows& truth, std::size_t bins) {
    std::vector<double> out;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double lo = truth[i][0], hi = truth[i][0];
        for (std::size_t j = 0; j < truth[i].size(); ++j) {
            lo = std::min({lo, truth[i][j], pred[i][j]});
            hi = std::max({hi, truth[i][j], pred[i][j]});
        }
        if (!(hi > lo)) {
            out.push_back(0.0);
            continue;
        }
        std::vector<double> edges(bins + 1);
        for (std::size_t k = 0; k <= bins; ++k) edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
        edges[bins] = hi;
        out.push_back(std::clamp(js(histogram(pred[i], edges), histogram(truth[i], edges)), 0.0, std::log(2.0)));
    }
    return out;
}

// Plain O(n^2) periodogram; returns the frequency of the largest bin above 0.
inline double dft_peak_hz(const std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    const double m = mean(x);
    double best = -1.0;
    std::size_t best_k = 1;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += (x[j] - m) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * j) / static_cast<double>(n));
        }
        if (std::norm(s) > best) {
            best = std::norm(s);
            best_k = k;
        }
    }
    return static_cast<double>(best_k) / (static_cast<double>(n) * dt);
}

// Amplitude of the projection of x onto a sinusoid of frequency f (least squares).
inline double tone_amplitude(const std::vector<double>& x, double dt, double f, std::size_t first, std::size_t last) {
    double cc = 0, ss = 0, cs = 0, xc = 0, xs = 0;
    for (std::size_t j = first; j < last; ++j) {
        const double w = 2.0 * std::numbers::pi * f * static_cast<double>(j) * dt;
        const double c = std::cos(w), s = std::sin(w);
        cc += c * c;
        ss += s * s;
        cs += c * s;
        xc += x[j] * c;
        xs += x[j] * s;
    }
    const double det = cc * ss - cs * cs;
    const double a = (xc * ss - xs * cs) / det;
    const double b = (xs * cc - xc * cs) / det;
    return std::hypot(a, b);
}

// Block-Hankel matrix straight from the definition: column j, block b holds
// sample j + n_d - b (X) or j + 1 + n_d - b (X').
inline Rows hankel(const Rows& states, std::size_t n_d, bool shifted) {
    const std::size_t n = states.size();
    const std::size_t m = states[0].size();
    const std::size_t cols = m - 1 - n_d;
    Rows out(n * (n_d + 1), std::vector<double>(cols));
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t b = 0; b <= n_d; ++b) {
            for (std::size_t c = 0; c < n; ++c) out[b * n + c][j] = states[c][j + n_d - b + (shifted ? 1 : 0)];
        }
    }
    return out;
}

// Direct convolution with reflected (mirror, edge not repeated) padding.
inline std::vector<double> fir_reflect(const std::vector<double>& x, const std::vector<double>& h) {
    const auto n = static_cast<long>(x.size());
    const auto half = static_cast<long>(h.size() / 2);
    std::vector<double> y(x.size(), 0.0);
    for (long j = 0; j < n; ++j) {
        double s = 0.0;
        for (long k = -half; k <= half; ++k) {
            long i = j + k;
            while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
            s += h[static_cast<std::size_t>(half - k)] * x[static_cast<std::size_t>(i)];
        }
        y[static_cast<std::size_t>(j)] = s;
    }
    return y;
}

// Linear-interpolation quantile of an unsorted sample, computed by selection.
inline double quantile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const double lo = std::floor(h);
    const double hi = std::ceil(h);
    return x[static_cast<std::size_t>(lo)] + (h - lo) * (x[static_cast<std::size_t>(hi)] - x[static_cast<std::size_t>(lo)]);
}

}  // namespace oracle
