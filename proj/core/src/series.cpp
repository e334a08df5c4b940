#include "hdmd/series.hpp"

#include "hdmd/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace hdmd {

MultivariateSeries::MultivariateSeries(std::vector<std::string> channels, double dt,
                                       Eigen::MatrixXd values, double t0)
    : channels_(std::move(channels)), dt_(dt), values_(std::move(values)), t0_(t0) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw ValidationError("sample interval must be positive, got " + std::to_string(dt_));
    }
    if (values_.cols() < 1) throw ValidationError("series needs at least one sample");
    if (static_cast<std::size_t>(values_.rows()) != channels_.size()) {
        throw ShapeError("series has " + std::to_string(channels_.size()) + " channel names but " +
                         std::to_string(values_.rows()) + " value rows");
    }
    std::set<std::string> seen;
    for (const auto& name : channels_) {
        if (!seen.insert(name).second) throw ValidationError("duplicate channel name '" + name + "'");
    }
    if (!values_.allFinite()) throw ValidationError("series contains non-finite values");
}

std::size_t MultivariateSeries::index_at(double t) const {
    const double pos = (t - t0_) / dt_;
    const double rounded = std::round(pos);
    if (std::abs(pos - rounded) > 1e-6 || rounded < 0.0 ||
        rounded > static_cast<double>(n_samples() - 1)) {
        std::ostringstream msg;
        msg << "time " << t << " is not a sample of the record [" << t0_ << ", " << end_time()
            << "] with dt " << dt_;
        throw ValidationError(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

std::optional<std::size_t> MultivariateSeries::channel_index(const std::string& name) const {
    const auto it = std::find(channels_.begin(), channels_.end(), name);
    if (it == channels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - channels_.begin());
}

MultivariateSeries MultivariateSeries::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > n_samples()) {
        throw ShapeError("slice [" + std::to_string(first) + ", " + std::to_string(first + count) +
                         ") outside record of " + std::to_string(n_samples()) + " samples");
    }
    return MultivariateSeries(channels_, dt_,
                              values_.middleCols(static_cast<Eigen::Index>(first),
                                                 static_cast<Eigen::Index>(count)),
                              time(first));
}

MultivariateSeries MultivariateSeries::with_values(Eigen::MatrixXd values) const {
    return MultivariateSeries(channels_, dt_, std::move(values), t0_);
}

double population_mean(std::span<const double> x) {
    if (x.empty()) throw ValidationError("mean of empty sample");
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double population_std(std::span<const double> x) {
    const double m = population_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

namespace {

void check_increasing(std::span<const double> t) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            std::ostringstream msg;
            msg << "timestamps must be strictly increasing (t[" << i - 1 << "] = " << t[i - 1]
                << ", t[" << i << "] = " << t[i] << ")";
            throw ValidationError(msg.str());
        }
    }
}

}  // namespace

std::vector<double> interpolate_linear(std::span<const double> t, std::span<const double> v,
                                       std::span<const double> query) {
    if (t.size() != v.size()) throw ShapeError("time and value arrays differ in length");
    if (t.size() < 2) throw ValidationError("interpolation needs at least two samples");
    check_increasing(t);

    std::vector<double> out;
    out.reserve(query.size());
    std::size_t seg = 0;
    for (double q : query) {
        if (!(q >= t.front() && q <= t.back())) {
            std::ostringstream msg;
            msg << "query time " << q << " outside [" << t.front() << ", " << t.back()
                << "]; extrapolation is not supported";
            throw ValidationError(msg.str());
        }
        if (q < t[seg]) seg = 0;
        while (seg + 2 < t.size() && q > t[seg + 1]) ++seg;
        const double t0 = t[seg];
        const double t1 = t[seg + 1];
        const double snap = 1e-9 * (t1 - t0);
        if (std::abs(q - t0) <= snap) {
            out.push_back(v[seg]);
        } else if (std::abs(q - t1) <= snap) {
            out.push_back(v[seg + 1]);
        } else {
            out.push_back(v[seg] + (v[seg + 1] - v[seg]) * ((q - t0) / (t1 - t0)));
        }
    }
    return out;
}

std::vector<double> uniform_grid(std::span<const double> t, double dt_target) {
    if (!(dt_target > 0.0)) throw ValidationError("target sample interval must be positive");
    if (t.empty()) throw ValidationError("empty time axis");
    const double first = t.front();
    const double last = t.back();
    const auto count = static_cast<std::size_t>(std::floor((last - first) / dt_target + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = std::min(first + static_cast<double>(k) * dt_target, last);
    }
    return grid;
}

std::vector<double> resample_uniform(std::span<const double> t, std::span<const double> v,
                                     double dt_target) {
    const auto grid = uniform_grid(t, dt_target);
    return interpolate_linear(t, v, grid);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line) {
    double value = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError("expected a number, found '" + std::string(field) + "'", line);
    }
    return value;
}

}  // namespace

MultivariateSeries parse_csv(const std::string& text, double dt_target) {
    std::vector<std::string_view> lines;
    {
        std::string_view rest(text);
        while (!rest.empty()) {
            const auto nl = rest.find('\n');
            lines.push_back(rest.substr(0, nl));
            if (nl == std::string_view::npos) break;
            rest.remove_prefix(nl + 1);
        }
    }
    // Line numbers are 1-based over the raw file; blank lines are skipped.
    std::size_t header_line = 0;
    while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw ValidationError("CSV input is empty");

    auto header = split_fields(trim(lines[header_line]));
    if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().remove_prefix(3);
    if (header.size() < 2 || header.front() != "time") {
        throw ParseError("header must be 'time,<channel>,...'", header_line + 1);
    }
    std::vector<std::string> channels;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError("empty channel name", header_line + 1);
        channels.emplace_back(header[c]);
    }
    const std::size_t n_ch = channels.size();

    std::vector<double> times;
    std::vector<std::vector<double>> columns(n_ch);
    for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != n_ch + 1) {
            throw ParseError("expected " + std::to_string(n_ch + 1) + " fields, found " +
                                 std::to_string(fields.size()),
                             i + 1);
        }
        const double t = parse_number(fields[0], i + 1);
        if (!times.empty() && !(t > times.back())) {
            std::ostringstream msg;
            msg << "line " << i + 1 << ": timestamp " << t
                << " does not increase (previous " << times.back() << ")";
            throw ValidationError(msg.str());
        }
        times.push_back(t);
        for (std::size_t c = 0; c < n_ch; ++c) columns[c].push_back(parse_number(fields[c + 1], i + 1));
    }
    if (times.empty()) throw ValidationError("CSV input has a header but no data rows");

    if (times.size() == 1) {
        Eigen::MatrixXd values(n_ch, 1);
        for (std::size_t c = 0; c < n_ch; ++c) values(static_cast<Eigen::Index>(c), 0) = columns[c][0];
        return MultivariateSeries(std::move(channels), dt_target, std::move(values), times[0]);
    }

    const auto grid = uniform_grid(times, dt_target);
    Eigen::MatrixXd values(n_ch, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t c = 0; c < n_ch; ++c) {
        const auto row = interpolate_linear(times, columns[c], grid);
        values.row(static_cast<Eigen::Index>(c)) =
            Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    }
    return MultivariateSeries(std::move(channels), dt_target, std::move(values), times[0]);
}

MultivariateSeries load_csv(const std::filesystem::path& path, double dt_target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), dt_target);
}

namespace {

void put_number(std::ostringstream& out, double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.write(buf.data(), res.ptr - buf.data());
}

}  // namespace

std::string format_csv(const MultivariateSeries& series) {
    std::ostringstream out;
    out << "time";
    for (const auto& name : series.channels()) out << ',' << name;
    out << '\n';
    const auto& v = series.values();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        put_number(out, series.time(static_cast<std::size_t>(j)));
        for (Eigen::Index c = 0; c < v.rows(); ++c) {
            out << ',';
            put_number(out, v(c, j));
        }
        out << '\n';
    }
    return out.str();
}

void write_csv(const MultivariateSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << format_csv(series);
}

ZScoreStats zscore_fit(const MultivariateSeries& series, const ZScoreOptions& options) {
    if (series.n_samples() < 2) throw ValidationError("z-score fit needs at least two samples");
    const auto n = series.n_channels();
    ZScoreStats stats{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (std::size_t c = 0; c < n; ++c) {
        const Eigen::RowVectorXd row = series.values().row(static_cast<Eigen::Index>(c));
        const std::span<const double> x(row.data(), static_cast<std::size_t>(row.size()));
        const double m = population_mean(x);
        double s = population_std(x);
        if (!(s > 1e-12 * std::max(1.0, std::abs(m)))) {
            if (!options.constant_channel_std) {
                throw ValidationError("channel '" + series.channels()[c] +
                                      "' is constant; cannot standardize");
            }
            s = *options.constant_channel_std;
        }
        stats.mean(static_cast<Eigen::Index>(c)) = m;
        stats.stddev(static_cast<Eigen::Index>(c)) = s;
    }
    return stats;
}

namespace {

void check_stats(const MultivariateSeries& series, const ZScoreStats& stats) {
    const auto n = static_cast<Eigen::Index>(series.n_channels());
    if (stats.mean.size() != n || stats.stddev.size() != n) {
        throw ShapeError("z-score statistics do not match the channel count");
    }
}

}  // namespace

MultivariateSeries zscore_apply(const MultivariateSeries& series, const ZScoreStats& stats) {
    check_stats(series, stats);
    Eigen::MatrixXd z = (series.values().colwise() - stats.mean).array().colwise() /
                        stats.stddev.array();
    return series.with_values(std::move(z));
}

MultivariateSeries zscore_invert(const MultivariateSeries& series, const ZScoreStats& stats) {
    check_stats(series, stats);
    Eigen::MatrixXd x = (series.values().array().colwise() * stats.stddev.array()).matrix();
    x.colwise() += stats.mean;
    return series.with_values(std::move(x));
}

}  // namespace hdmd
