#include "svtime/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "svtime/errors.hpp"

namespace svtime {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

} // namespace

SeriesMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    strip_cr(line);

    std::vector<std::string> header = split_fields(line);
    if (header.size() < 2)
        throw DataError("fewer than 2 columns in " + path);

    const std::size_t ncols = header.size();
    const std::size_t nvar = ncols - 1;

    SeriesMatrix s;
    s.variate_names.assign(header.begin() + 1, header.end());

    std::vector<double> cells; // row-major data rows, nvar wide
    std::size_t nrows = 0;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != ncols) {
            throw DataError("data row " + std::to_string(nrows + 1) + " has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(ncols));
        }
        s.timestamps.push_back(fields[0]);
        for (std::size_t c = 1; c < ncols; ++c) {
            const std::string& f = fields[c];
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
            if (ec != std::errc() || ptr != f.data() + f.size()) {
                throw DataError("non-numeric cell at data row " + std::to_string(nrows + 1) +
                                ", column " + std::to_string(c + 1) + ": '" + f + "'");
            }
            cells.push_back(value);
        }
        ++nrows;
    }
    if (nrows < 2) throw DataError("fewer than 2 data rows in " + path);

    s.values = Matrix(nvar, nrows);
    for (std::size_t t = 0; t < nrows; ++t)
        for (std::size_t i = 0; i < nvar; ++i)
            s.values(i, t) = cells[t * nvar + i];

    for (std::size_t i = 0; i < nvar; ++i) {
        for (std::size_t t = 0; t < nrows; ++t) {
            if (!std::isfinite(s.values(i, t)))
                throw DataError("variate row " + std::to_string(i + 1) + " ('" +
                                s.variate_names[i] + "') contains a non-finite value");
        }
    }
    return s;
}

SplitSpec SplitSpec::ratio(double train, double val, double test) {
    if (train < 0 || val < 0 || test < 0)
        throw ConfigError("split ratios must be non-negative");
    if (std::fabs(train + val + test - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1");
    SplitSpec spec;
    spec.mode = SplitMode::Ratio;
    spec.ratios = {train, val, test};
    return spec;
}

SplitSpec SplitSpec::ett_border(SamplingFrequency f) {
    SplitSpec spec;
    spec.mode = SplitMode::EttBorder;
    switch (f) {
    case SamplingFrequency::Hourly: spec.border_sizes = {8640, 2880, 2880}; break;
    case SamplingFrequency::Min15: spec.border_sizes = {34560, 11520, 11520}; break;
    default: throw ConfigError("ETT border split is defined for hourly and 15-minute data only");
    }
    return spec;
}

namespace {

SeriesMatrix slice(const SeriesMatrix& s, std::size_t begin, std::size_t end) {
    SeriesMatrix out;
    out.variate_names = s.variate_names;
    out.timestamps.assign(s.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                          s.timestamps.begin() + static_cast<std::ptrdiff_t>(end));
    out.values = Matrix(s.variates(), end - begin);
    for (std::size_t i = 0; i < s.variates(); ++i)
        for (std::size_t t = begin; t < end; ++t)
            out.values(i, t - begin) = s.values(i, t);
    return out;
}

} // namespace

SplitResult split(const SeriesMatrix& series, const SplitSpec& spec,
                  std::size_t lookback, std::size_t horizon) {
    const std::size_t L = series.length();
    std::size_t b1 = 0, b2 = 0, b3 = 0;
    if (spec.mode == SplitMode::Ratio) {
        b1 = static_cast<std::size_t>(static_cast<double>(L) * spec.ratios[0]);
        b2 = static_cast<std::size_t>(static_cast<double>(L) * (spec.ratios[0] + spec.ratios[1]));
        b3 = L;
    } else {
        const std::size_t total = spec.border_sizes[0] + spec.border_sizes[1] + spec.border_sizes[2];
        if (L < total)
            throw DataError("series too short for ETT border split: " + std::to_string(L) +
                            " < " + std::to_string(total));
        b1 = spec.border_sizes[0];
        b2 = b1 + spec.border_sizes[1];
        b3 = b2 + spec.border_sizes[2];
    }

    const std::size_t need = lookback + horizon;
    auto check = [&](const char* name, std::size_t len, std::size_t overhang) {
        if (len + overhang < need)
            throw DataError(std::string(name) + " segment too short for one window (" +
                            std::to_string(len) + " points, need " + std::to_string(need - overhang) + ")");
    };
    const std::size_t val_over = std::min(lookback, b1);
    const std::size_t test_over = std::min(lookback, b2);
    check("train", b1, 0);
    check("validation", b2 - b1, val_over);
    check("test", b3 - b2, test_over);

    SplitResult r;
    r.train = slice(series, 0, b1);
    r.val = slice(series, b1, b2);
    r.test = slice(series, b2, b3);
    r.val_ext = slice(series, b1 - val_over, b2);
    r.test_ext = slice(series, b2 - test_over, b3);
    r.val_overhang = val_over;
    r.test_overhang = test_over;
    return r;
}

std::size_t count_windows(std::size_t segment_len, std::size_t lookback, std::size_t horizon) {
    if (segment_len < lookback + horizon) return 0;
    return segment_len - lookback - horizon + 1;
}

std::size_t lookback_window_count(std::size_t segment_len, std::size_t lookback) {
    if (segment_len < lookback) return 0;
    return segment_len - lookback + 1;
}

std::vector<std::size_t> window_origins(std::size_t segment_len, std::size_t lookback,
                                        std::size_t horizon) {
    if (lookback < 1 || horizon < 1) throw ConfigError("lookback and horizon must be >= 1");
    const std::size_t n = count_windows(segment_len, lookback, horizon);
    if (n == 0)
        throw DataError("no valid window: segment of " + std::to_string(segment_len) +
                        " points cannot fit lookback " + std::to_string(lookback) +
                        " + horizon " + std::to_string(horizon));
    std::vector<std::size_t> origins(n);
    for (std::size_t i = 0; i < n; ++i) origins[i] = lookback + i;
    return origins;
}

WindowPair window_at(const SeriesMatrix& segment, std::size_t origin,
                     std::size_t lookback, std::size_t horizon) {
    if (origin < lookback || origin + horizon > segment.length())
        throw DataError("window origin " + std::to_string(origin) + " out of range");
    WindowPair w;
    w.origin_index = origin;
    w.lookback = Matrix(segment.variates(), lookback);
    w.target = Matrix(segment.variates(), horizon);
    for (std::size_t i = 0; i < segment.variates(); ++i) {
        for (std::size_t t = 0; t < lookback; ++t)
            w.lookback(i, t) = segment.values(i, origin - lookback + t);
        for (std::size_t t = 0; t < horizon; ++t)
            w.target(i, t) = segment.values(i, origin + t);
    }
    return w;
}

void row_norm_stats(std::span<const double> row, bool mean_center, double& mean, double& stddev) {
    const std::size_t n = row.size();
    double m = 0.0;
    if (mean_center) {
        for (double x : row) m += x;
        m /= static_cast<double>(n);
    }
    double ss = 0.0;
    for (double x : row) {
        const double d = x - m;
        ss += d * d;
    }
    mean = m;
    stddev = std::max(std::sqrt(ss / static_cast<double>(n)), kStdFloor);
}

std::pair<Matrix, NormStats> normalize(const Matrix& lookback, bool mean_center) {
    Matrix out(lookback.rows, lookback.cols);
    NormStats stats;
    stats.mean.resize(lookback.rows);
    stats.stddev.resize(lookback.rows);
    for (std::size_t i = 0; i < lookback.rows; ++i) {
        row_norm_stats(lookback.row_span(i), mean_center, stats.mean[i], stats.stddev[i]);
        const double inv = 1.0 / stats.stddev[i];
        for (std::size_t t = 0; t < lookback.cols; ++t)
            out(i, t) = (lookback(i, t) - stats.mean[i]) * inv;
    }
    return {std::move(out), std::move(stats)};
}

Matrix denormalize(const Matrix& normalized, const NormStats& stats) {
    if (normalized.rows != stats.mean.size())
        throw DataError("denormalize: row count does not match stats");
    Matrix out(normalized.rows, normalized.cols);
    for (std::size_t i = 0; i < normalized.rows; ++i)
        for (std::size_t t = 0; t < normalized.cols; ++t)
            out(i, t) = normalized(i, t) * stats.stddev[i] + stats.mean[i];
    return out;
}

Standardization fit_standardization(const SeriesMatrix& train) {
    Standardization st;
    st.mean.resize(train.variates());
    st.stddev.resize(train.variates());
    for (std::size_t i = 0; i < train.variates(); ++i)
        row_norm_stats(train.values.row_span(i), true, st.mean[i], st.stddev[i]);
    return st;
}

SeriesMatrix standardize(const SeriesMatrix& s, const Standardization& st) {
    if (s.variates() != st.mean.size())
        throw DataError("standardize: variate count mismatch (" + std::to_string(s.variates()) +
                        " vs " + std::to_string(st.mean.size()) + ")");
    SeriesMatrix out = s;
    for (std::size_t i = 0; i < s.variates(); ++i) {
        const double inv = 1.0 / st.stddev[i];
        for (std::size_t t = 0; t < s.length(); ++t)
            out.values(i, t) = (s.values(i, t) - st.mean[i]) * inv;
    }
    return out;
}

void destandardize_rows(Matrix& rows, const Standardization& st) {
    if (rows.rows != st.mean.size())
        throw DataError("destandardize: variate count mismatch");
    for (std::size_t i = 0; i < rows.rows; ++i)
        for (std::size_t t = 0; t < rows.cols; ++t)
            rows(i, t) = rows(i, t) * st.stddev[i] + st.mean[i];
}

} // namespace svtime
