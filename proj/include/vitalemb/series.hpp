#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace vitalemb {

// One subject's multichannel waveform record with protocol annotations.
struct SubjectSeries {
    std::string subject_id;
    double sample_rate_hz = 250.0;
    std::vector<std::string> channels;
    Matrix values;  // [num_channels x num_timesteps]
    std::size_t bleed_start_idx = 0;
    std::vector<std::size_t> draw_events;  // strictly increasing timestep indices
    std::vector<int> regime_labels;        // optional; empty or one per timestep
    bool dead_channel_warning = false;     // set by normalize() on zero variance

    std::size_t num_channels() const { return values.rows; }
    std::size_t num_timesteps() const { return values.cols; }

    void validate() const {
        if (values.rows < 1 || values.cols < 1)
            throw std::invalid_argument("SubjectSeries: empty value matrix");
        if (channels.size() != values.rows)
            throw std::invalid_argument("SubjectSeries: channel name count mismatch");
        if (sample_rate_hz <= 0.0)
            throw std::invalid_argument("SubjectSeries: sample_rate_hz must be positive");
        if (bleed_start_idx >= values.cols)
            throw std::invalid_argument("SubjectSeries: bleed_start_idx out of range");
        for (double x : values.data)
            if (!std::isfinite(x)) throw std::invalid_argument("SubjectSeries: non-finite value");
        for (std::size_t i = 0; i < draw_events.size(); ++i) {
            if (draw_events[i] >= values.cols)
                throw std::invalid_argument("SubjectSeries: draw event out of range");
            if (i > 0 && draw_events[i] <= draw_events[i - 1])
                throw std::invalid_argument("SubjectSeries: draw events not strictly increasing");
        }
        if (!regime_labels.empty() && regime_labels.size() != values.cols)
            throw std::invalid_argument("SubjectSeries: regime label length mismatch");
    }
};

struct Window {
    std::string subject_id;
    std::size_t start_idx = 0;
    std::size_t length = 0;
    Matrix values;  // [num_channels x length]
    double seconds_from_bleed = 0.0;
    bool overlaps_draw = false;
    int majority_regime = -1;  // -1 when the source carried no labels
};

struct WindowSet {
    std::vector<Window> windows;  // subject order then time order
};

// Channel-wise z-score over the full record (population std). Zero-variance
// channels are centered only and flagged as a dead sensor.
inline SubjectSeries normalize(const SubjectSeries& series) {
    series.validate();
    if (series.num_timesteps() < 2)
        throw std::invalid_argument("normalize: need at least 2 timesteps");
    SubjectSeries out = series;
    std::size_t t_count = series.num_timesteps();
    for (std::size_t c = 0; c < series.num_channels(); ++c) {
        double m = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) m += series.values(c, t);
        m /= static_cast<double>(t_count);
        double var = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) {
            double d = series.values(c, t) - m;
            var += d * d;
        }
        double sd = std::sqrt(var / static_cast<double>(t_count));
        if (sd == 0.0) {
            out.dead_channel_warning = true;
            for (std::size_t t = 0; t < t_count; ++t) out.values(c, t) = series.values(c, t) - m;
        } else {
            for (std::size_t t = 0; t < t_count; ++t)
                out.values(c, t) = (series.values(c, t) - m) / sd;
        }
    }
    return out;
}

// Nonoverlapping windows of fixed length; the trailing remainder is dropped.
inline WindowSet make_windows(const SubjectSeries& series, std::size_t length) {
    if (length < 1) throw std::invalid_argument("make_windows: length must be >= 1");
    WindowSet set;
    std::size_t n = series.num_timesteps() / length;
    for (std::size_t w = 0; w < n; ++w) {
        Window win;
        win.subject_id = series.subject_id;
        win.start_idx = w * length;
        win.length = length;
        win.values = Matrix(series.num_channels(), length);
        for (std::size_t c = 0; c < series.num_channels(); ++c)
            for (std::size_t t = 0; t < length; ++t)
                win.values(c, t) = series.values(c, win.start_idx + t);
        win.seconds_from_bleed =
            (static_cast<double>(win.start_idx) - static_cast<double>(series.bleed_start_idx)) /
            series.sample_rate_hz;
        for (std::size_t d : series.draw_events)
            if (d >= win.start_idx && d < win.start_idx + length) win.overlaps_draw = true;
        if (!series.regime_labels.empty()) {
            std::vector<int> counts;
            for (std::size_t t = win.start_idx; t < win.start_idx + length; ++t) {
                int lab = series.regime_labels[t];
                if (lab >= static_cast<int>(counts.size())) counts.resize(lab + 1, 0);
                ++counts[lab];
            }
            win.majority_regime = static_cast<int>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
        }
        set.windows.push_back(std::move(win));
    }
    return set;
}

namespace detail {
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
}  // namespace detail

// CSV schema:
//   # subject_id=<s> sample_rate_hz=<r> bleed_start_idx=<i> draw_events=<i1;i2;...> [regime_labels_file=<p>]
//   ch1,ch2,...
//   one timestep per row, one column per channel
inline void save_series(const SubjectSeries& series, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_series: cannot open " + path);
    f << "# subject_id=" << series.subject_id
      << " sample_rate_hz=" << detail::fmt_double(series.sample_rate_hz)
      << " bleed_start_idx=" << series.bleed_start_idx << " draw_events=";
    for (std::size_t i = 0; i < series.draw_events.size(); ++i) {
        if (i) f << ';';
        f << series.draw_events[i];
    }
    if (!series.regime_labels.empty()) {
        // Store only the sidecar's basename so the pair of files relocates
        // together and the CSV bytes do not depend on the output directory.
        std::string labels_path = path + ".labels";
        f << " regime_labels_file=" << std::filesystem::path(labels_path).filename().string();
        std::ofstream lf(labels_path);
        for (int lab : series.regime_labels) lf << lab << '\n';
    }
    f << '\n';
    for (std::size_t c = 0; c < series.channels.size(); ++c) {
        if (c) f << ',';
        f << series.channels[c];
    }
    f << '\n';
    for (std::size_t t = 0; t < series.num_timesteps(); ++t) {
        for (std::size_t c = 0; c < series.num_channels(); ++c) {
            if (c) f << ',';
            f << detail::fmt_double(series.values(c, t));
        }
        f << '\n';
    }
}

inline SubjectSeries load_series(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_series: cannot open " + path);
    std::string header;
    if (!std::getline(f, header) || header.rfind("# ", 0) != 0)
        throw std::runtime_error("load_series: missing metadata header line");

    SubjectSeries s;
    bool have_bleed = false, have_rate = false, have_id = false;
    std::string labels_file;
    std::istringstream hs(header.substr(2));
    std::string tok;
    while (hs >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("load_series: malformed header token '" + tok + "'");
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        if (key == "subject_id") {
            s.subject_id = val;
            have_id = true;
        } else if (key == "sample_rate_hz") {
            s.sample_rate_hz = std::stod(val);
            have_rate = true;
        } else if (key == "bleed_start_idx") {
            s.bleed_start_idx = std::stoull(val);
            have_bleed = true;
        } else if (key == "draw_events") {
            std::istringstream ds(val);
            std::string part;
            while (std::getline(ds, part, ';'))
                if (!part.empty()) s.draw_events.push_back(std::stoull(part));
        } else if (key == "regime_labels_file") {
            labels_file = val;
        } else {
            throw std::runtime_error("load_series: unknown header key '" + key + "'");
        }
    }
    if (!have_id) throw std::runtime_error("load_series: missing subject_id");
    if (!have_rate) throw std::runtime_error("load_series: missing sample_rate_hz");
    if (!have_bleed) throw std::runtime_error("load_series: missing bleed_start_idx");

    std::string chan_line;
    if (!std::getline(f, chan_line) || chan_line.empty())
        throw std::runtime_error("load_series: missing channel header row");
    {
        std::istringstream cs(chan_line);
        std::string name;
        while (std::getline(cs, name, ',')) s.channels.push_back(name);
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t row_no = 2;
    while (std::getline(f, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            ++col;
            std::size_t consumed = 0;
            double x;
            try {
                x = std::stod(cell, &consumed);
            } catch (const std::exception&) {
                throw std::runtime_error("load_series: non-numeric cell at row " +
                                         std::to_string(row_no) + " column " + std::to_string(col));
            }
            if (consumed != cell.size())
                throw std::runtime_error("load_series: non-numeric cell at row " +
                                         std::to_string(row_no) + " column " + std::to_string(col));
            if (!std::isfinite(x))
                throw std::runtime_error("load_series: non-finite value at row " +
                                         std::to_string(row_no) + " column " + std::to_string(col));
            row.push_back(x);
        }
        if (row.size() != s.channels.size())
            throw std::runtime_error("load_series: inconsistent row length at row " +
                                     std::to_string(row_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_series: no data rows");

    s.values = Matrix(s.channels.size(), rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t c = 0; c < s.channels.size(); ++c) s.values(c, t) = rows[t][c];

    if (!labels_file.empty()) {
        std::filesystem::path lp(labels_file);
        if (lp.is_relative()) lp = std::filesystem::path(path).parent_path() / lp;
        labels_file = lp.string();
        std::ifstream lf(labels_file);
        if (!lf) throw std::runtime_error("load_series: cannot open labels file " + labels_file);
        int lab;
        while (lf >> lab) s.regime_labels.push_back(lab);
    }
    s.validate();
    return s;
}

}  // namespace vitalemb
