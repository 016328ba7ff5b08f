#pragma once

#include <filesystem>
#include <map>

#include "clustering.hpp"
#include "crossval.hpp"
#include "features.hpp"
#include "synthetic.hpp"
#include "time_embedding.hpp"
#include "training.hpp"

namespace vitalemb {

struct EmbeddingRecord {
    std::string subject_id;
    std::size_t window_start = 0;
    double seconds_from_bleed = 0.0;
    bool overlaps_draw = false;
    int majority_regime = -1;
    std::vector<double> values;
};

struct TimelineEntry {
    double seconds_from_bleed = 0.0;
    int cluster_label = 0;
    bool overlaps_draw = false;
};

struct ClusterTimeline {
    std::map<std::string, std::vector<TimelineEntry>> by_subject;
    std::size_t k = 0;
    std::string method;
};

// One embedding per window, subject order then time order.
inline std::vector<EmbeddingRecord> embed_all(const EncoderParams& params,
                                              const WindowSet& windows) {
    std::vector<EmbeddingRecord> out;
    out.reserve(windows.windows.size());
    for (const Window& w : windows.windows) {
        Embedding e = forward(params, w.values);
        EmbeddingRecord rec;
        rec.subject_id = w.subject_id;
        rec.window_start = w.start_idx;
        rec.seconds_from_bleed = w.seconds_from_bleed;
        rec.overlaps_draw = w.overlaps_draw;
        rec.majority_regime = w.majority_regime;
        rec.values = std::move(e.values);
        out.push_back(std::move(rec));
    }
    return out;
}

inline void write_embeddings_csv(const std::vector<EmbeddingRecord>& records,
                                 const std::string& path) {
    if (records.empty()) throw std::invalid_argument("write_embeddings_csv: no records");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_embeddings_csv: cannot open " + path);
    f << "subject_id,window_start,seconds_from_bleed,overlaps_draw,majority_regime";
    for (std::size_t d = 0; d < records[0].values.size(); ++d) f << ",e" << d;
    f << '\n';
    for (const auto& r : records) {
        f << r.subject_id << ',' << r.window_start << ','
          << detail::fmt_double(r.seconds_from_bleed) << ',' << (r.overlaps_draw ? 1 : 0) << ','
          << r.majority_regime;
        for (double v : r.values) f << ',' << detail::fmt_double(v);
        f << '\n';
    }
}

inline std::vector<EmbeddingRecord> read_embeddings_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_embeddings_csv: cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw std::runtime_error("read_embeddings_csv: empty file");
    std::vector<EmbeddingRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        EmbeddingRecord r;
        std::getline(ls, r.subject_id, ',');
        std::getline(ls, cell, ',');
        r.window_start = std::stoull(cell);
        std::getline(ls, cell, ',');
        r.seconds_from_bleed = std::stod(cell);
        std::getline(ls, cell, ',');
        r.overlaps_draw = cell == "1";
        std::getline(ls, cell, ',');
        r.majority_regime = std::stoi(cell);
        while (std::getline(ls, cell, ',')) r.values.push_back(std::stod(cell));
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_labels_csv(const std::vector<EmbeddingRecord>& records,
                             const std::vector<int>& labels, const std::string& path) {
    if (records.size() != labels.size())
        throw std::invalid_argument("write_labels_csv: length mismatch");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_labels_csv: cannot open " + path);
    f << "subject_id,window_start,seconds_from_bleed,label\n";
    for (std::size_t i = 0; i < records.size(); ++i)
        f << records[i].subject_id << ',' << records[i].window_start << ','
          << detail::fmt_double(records[i].seconds_from_bleed) << ',' << labels[i] << '\n';
}

inline ClusterTimeline build_timeline(const std::vector<EmbeddingRecord>& records,
                                      const std::vector<int>& labels, std::size_t k,
                                      const std::string& method) {
    if (records.size() != labels.size())
        throw std::invalid_argument("build_timeline: length mismatch");
    ClusterTimeline tl;
    tl.k = k;
    tl.method = method;
    for (std::size_t i = 0; i < records.size(); ++i)
        tl.by_subject[records[i].subject_id].push_back(
            {records[i].seconds_from_bleed, labels[i], records[i].overlaps_draw});
    for (auto& [_, entries] : tl.by_subject)
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].seconds_from_bleed <= entries[i - 1].seconds_from_bleed)
                throw std::invalid_argument("build_timeline: time not strictly increasing");
    return tl;
}

// Fixed palette keyed by label id so figures are comparable across runs.
inline std::string label_color(int label) {
    static const char* palette[12] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52",
                                      "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
                                      "#ccb974", "#64b5cd", "#2f4b7c", "#ffa600"};
    return palette[label % 12];
}

// One horizontal band per subject, x = seconds from bleed start (t=0 marked),
// colored per cluster label, draw events overlaid as dots.
inline void render_timeline_svg(const ClusterTimeline& timeline, const std::string& path) {
    if (timeline.by_subject.empty())
        throw std::invalid_argument("render_timeline_svg: empty timeline");
    double t_min = 1e300, t_max = -1e300;
    for (const auto& [_, entries] : timeline.by_subject)
        for (const auto& e : entries) {
            t_min = std::min(t_min, e.seconds_from_bleed);
            t_max = std::max(t_max, e.seconds_from_bleed);
        }
    if (t_max <= t_min) t_max = t_min + 1.0;

    const double width = 900.0, band_h = 24.0, gap = 8.0, margin = 60.0;
    const std::size_t n_subj = timeline.by_subject.size();
    const double height = margin + static_cast<double>(n_subj) * (band_h + gap) + 30.0;
    auto x_of = [&](double t) {
        return margin + (t - t_min) / (t_max - t_min) * (width - 2 * margin);
    };

    std::ofstream f(path);
    if (!f) throw std::runtime_error("render_timeline_svg: cannot open " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
    f << "<text x=\"10\" y=\"20\" font-size=\"14\">" << timeline.method << ", k=" << timeline.k
      << "</text>\n";

    std::size_t row = 0;
    for (const auto& [subject, entries] : timeline.by_subject) {
        double y = margin + static_cast<double>(row) * (band_h + gap);
        f << "<text x=\"4\" y=\"" << y + band_h * 0.7 << "\" font-size=\"10\">" << subject
          << "</text>\n";
        for (std::size_t i = 0; i < entries.size(); ++i) {
            double x0 = x_of(entries[i].seconds_from_bleed);
            double x1 = i + 1 < entries.size() ? x_of(entries[i + 1].seconds_from_bleed)
                                               : x_of(t_max);
            f << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << std::max(x1 - x0, 0.5)
              << "\" height=\"" << band_h << "\" fill=\"" << label_color(entries[i].cluster_label)
              << "\"/>\n";
        }
        for (const auto& e : entries)
            if (e.overlaps_draw)
                f << "<circle cx=\"" << x_of(e.seconds_from_bleed) << "\" cy=\"" << y + band_h / 2
                  << "\" r=\"2.5\" fill=\"black\"/>\n";
        ++row;
    }
    // t = 0 marker.
    if (t_min <= 0.0 && t_max >= 0.0) {
        double x0 = x_of(0.0);
        f << "<line x1=\"" << x0 << "\" y1=\"" << margin - 10 << "\" x2=\"" << x0 << "\" y2=\""
          << height - 20 << "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n";
        f << "<text x=\"" << x0 + 3 << "\" y=\"" << margin - 14 << "\" font-size=\"10\">t=0</text>\n";
    }
    f << "</svg>\n";
}

inline void write_timeline_csv(const ClusterTimeline& timeline, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_timeline_csv: cannot open " + path);
    f << "subject_id,seconds_from_bleed,label,overlaps_draw\n";
    for (const auto& [subject, entries] : timeline.by_subject)
        for (const auto& e : entries)
            f << subject << ',' << detail::fmt_double(e.seconds_from_bleed) << ','
              << e.cluster_label << ',' << (e.overlaps_draw ? 1 : 0) << '\n';
}

// FNV-1a 64-bit content digest, hex-encoded. Used in manifests to pin
// artifact bytes.
inline std::string file_digest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("file_digest: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (f.gcount() < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

struct EncoderCvResult {
    std::vector<ClusterTimeline> fold_timelines;
    std::vector<std::vector<std::string>> train_subjects;
    std::vector<std::vector<std::string>> test_subjects;
};

// Robustness check: per fold, train on the training subjects only, embed all
// subjects with that encoder, and cluster all embeddings jointly.
inline EncoderCvResult encoder_cv(const std::vector<SubjectSeries>& sources,
                                  const EncoderConfig& enc_cfg, const TrainConfig& train_cfg,
                                  std::size_t window_length, std::size_t cluster_k = 10,
                                  std::size_t num_folds = 4) {
    if (sources.size() < num_folds)
        throw std::invalid_argument("encoder_cv: fewer subjects than folds");
    EncoderCvResult result;

    std::vector<WindowSet> all_windows;
    for (const auto& s : sources) all_windows.push_back(make_windows(s, window_length));

    for (std::size_t f = 0; f < num_folds; ++f) {
        std::vector<Matrix> train_sources;
        std::vector<std::string> train_ids, test_ids;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            if (i % num_folds == f) {
                test_ids.push_back(sources[i].subject_id);
            } else {
                train_ids.push_back(sources[i].subject_id);
                train_sources.push_back(sources[i].values);
            }
        }
        TrainConfig fold_cfg = train_cfg;
        fold_cfg.seed = Rng(train_cfg.seed).derive(f + 101);
        TrainResult trained = train(train_sources, enc_cfg, fold_cfg);

        std::vector<EmbeddingRecord> records;
        for (const auto& ws : all_windows) {
            auto recs = embed_all(trained.params, ws);
            records.insert(records.end(), recs.begin(), recs.end());
        }
        std::vector<std::vector<double>> points;
        for (const auto& r : records) points.push_back(r.values);
        ClusterAssignment assignment = ward_agglomerative(points, cluster_k);
        result.fold_timelines.push_back(
            build_timeline(records, assignment.labels, cluster_k, "ward"));
        result.train_subjects.push_back(train_ids);
        result.test_subjects.push_back(test_ids);
    }
    return result;
}

}  // namespace vitalemb
