#pragma once

#include "pipeline.hpp"

namespace vitalemb {

constexpr const char* kToolVersion = "vitalemb 0.1.0";

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                                const std::string& section) {
    if (!obj.is_object()) throw std::runtime_error("config section '" + section + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::runtime_error("unknown config key '" + it.key() + "' in section '" +
                                     section + "'");
}

}  // namespace detail

inline SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"num_subjects", "sample_rate_hz", "baseline_minutes", "bleed_minutes", "num_regimes",
         "regime_boundaries", "draw_interval_minutes", "draw_artifact_magnitude",
         "draw_artifact_seconds", "noise_std", "seed"},
        "data.synthetic");
    SyntheticConfig cfg = default_synthetic_config(j.value("num_regimes", 3));
    cfg.num_subjects = j.value("num_subjects", cfg.num_subjects);
    cfg.sample_rate_hz = j.value("sample_rate_hz", cfg.sample_rate_hz);
    cfg.baseline_minutes = j.value("baseline_minutes", cfg.baseline_minutes);
    cfg.bleed_minutes = j.value("bleed_minutes", cfg.bleed_minutes);
    if (j.contains("regime_boundaries"))
        cfg.regime_boundaries = j.at("regime_boundaries").get<std::vector<double>>();
    cfg.draw_interval_minutes = j.value("draw_interval_minutes", cfg.draw_interval_minutes);
    cfg.draw_artifact_magnitude = j.value("draw_artifact_magnitude", cfg.draw_artifact_magnitude);
    cfg.draw_artifact_seconds = j.value("draw_artifact_seconds", cfg.draw_artifact_seconds);
    cfg.noise_std = j.value("noise_std", cfg.noise_std);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.validate();
    return cfg;
}

inline nlohmann::json synthetic_config_to_json(const SyntheticConfig& cfg) {
    return {{"num_subjects", cfg.num_subjects},
            {"sample_rate_hz", cfg.sample_rate_hz},
            {"baseline_minutes", cfg.baseline_minutes},
            {"bleed_minutes", cfg.bleed_minutes},
            {"num_regimes", cfg.num_regimes},
            {"regime_boundaries", cfg.regime_boundaries},
            {"draw_interval_minutes", cfg.draw_interval_minutes},
            {"draw_artifact_magnitude", cfg.draw_artifact_magnitude},
            {"draw_artifact_seconds", cfg.draw_artifact_seconds},
            {"noise_std", cfg.noise_std},
            {"seed", cfg.seed}};
}

inline EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"in_channels", "hidden_channels", "num_layers", "kernel_size",
                                 "dilation_base", "embedding_dim", "leaky_slope", "residual"},
                                "encoder");
    EncoderConfig cfg;
    cfg.in_channels = j.value("in_channels", cfg.in_channels);
    cfg.hidden_channels = j.value("hidden_channels", cfg.hidden_channels);
    cfg.num_layers = j.value("num_layers", cfg.num_layers);
    cfg.kernel_size = j.value("kernel_size", cfg.kernel_size);
    cfg.dilation_base = j.value("dilation_base", cfg.dilation_base);
    cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
    cfg.leaky_slope = j.value("leaky_slope", cfg.leaky_slope);
    cfg.residual = j.value("residual", cfg.residual);
    cfg.validate();
    return cfg;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"iterations", "negatives", "learning_rate", "optimizer", "scheme", "min_length",
         "max_length", "seed", "checkpoint_every"},
        "training");
    TrainConfig cfg;
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.negatives_per_item = j.value("negatives", cfg.negatives_per_item);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    std::string opt = j.value("optimizer", std::string("adam"));
    if (opt == "adam")
        cfg.optimizer = OptimizerKind::Adam;
    else if (opt == "sgd")
        cfg.optimizer = OptimizerKind::SGD;
    else
        throw std::runtime_error("unknown optimizer '" + opt + "'");
    cfg.scheme = parse_scheme(j.value("scheme", std::string("cross")));
    cfg.min_length = j.value("min_length", cfg.min_length);
    cfg.max_length = j.value("max_length", cfg.max_length);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
    return cfg;
}

struct PipelineConfig {
    std::uint64_t seed = 1;
    SyntheticConfig synthetic;
    bool use_synthetic = true;
    std::string data_dir;
    std::size_t window_length = 120;
    EncoderConfig encoder;
    TrainConfig training;
    TimeAttachMode time_mode = TimeAttachMode::None;
    double time_scale = 2.0;
    std::string cluster_method = "ward";
    std::vector<std::size_t> k_values = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::string classify_model = "rf";
    std::size_t folds = 0;  // 0 = leave-one-subject-out
    nlohmann::json raw;     // resolved config, echoed into the manifest
};

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"seed", "data", "windowing", "encoder", "training", "time", "clustering", "classify"},
        "root");
    PipelineConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("data")) {
        detail::reject_unknown_keys(j.at("data"), {"synthetic", "dir"}, "data");
        if (j.at("data").contains("dir")) {
            cfg.use_synthetic = false;
            cfg.data_dir = j.at("data").at("dir");
        } else {
            cfg.synthetic = synthetic_config_from_json(j.at("data").value("synthetic",
                                                                          nlohmann::json::object()));
        }
    } else {
        cfg.synthetic = default_synthetic_config();
    }
    if (j.contains("windowing")) {
        detail::reject_unknown_keys(j.at("windowing"), {"length"}, "windowing");
        cfg.window_length = j.at("windowing").value("length", cfg.window_length);
    }
    cfg.encoder = encoder_config_from_json(j.value("encoder", nlohmann::json::object()));
    cfg.training = train_config_from_json(j.value("training", nlohmann::json::object()));
    if (!j.contains("training") || !j.at("training").contains("seed"))
        cfg.training.seed = cfg.seed;
    if (j.contains("time")) {
        detail::reject_unknown_keys(j.at("time"), {"mode", "scale"}, "time");
        cfg.time_mode = parse_time_mode(j.at("time").value("mode", std::string("none")));
        cfg.time_scale = j.at("time").value("scale", cfg.time_scale);
    }
    if (j.contains("clustering")) {
        detail::reject_unknown_keys(j.at("clustering"), {"method", "k_values"}, "clustering");
        cfg.cluster_method = j.at("clustering").value("method", cfg.cluster_method);
        if (j.at("clustering").contains("k_values"))
            cfg.k_values = j.at("clustering").at("k_values").get<std::vector<std::size_t>>();
    }
    if (j.contains("classify")) {
        detail::reject_unknown_keys(j.at("classify"), {"model", "folds"}, "classify");
        cfg.classify_model = j.at("classify").value("model", cfg.classify_model);
        cfg.folds = j.at("classify").value("folds", cfg.folds);
    }
    cfg.raw = j;
    return cfg;
}

inline void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_confusion_csv: cannot open " + path);
    f << "true\\pred";
    for (std::size_t c = 0; c < cm.k; ++c) f << ",c" << c;
    f << '\n';
    for (std::size_t r = 0; r < cm.k; ++r) {
        f << 'c' << r;
        for (std::size_t c = 0; c < cm.k; ++c) f << ',' << cm.counts[r][c];
        f << '\n';
    }
}

// Simple heatmap of the aggregate confusion matrix.
inline void render_confusion_svg(const ConfusionMatrix& cm, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("render_confusion_svg: cannot open " + path);
    const double cell = 36.0, margin = 50.0;
    double size = margin + cm.k * cell + 10.0;
    long long max_count = 1;
    for (const auto& row : cm.counts)
        for (long long c : row) max_count = std::max(max_count, c);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\">\n";
    for (std::size_t r = 0; r < cm.k; ++r) {
        for (std::size_t c = 0; c < cm.k; ++c) {
            double frac = static_cast<double>(cm.counts[r][c]) / static_cast<double>(max_count);
            int shade = static_cast<int>(255.0 * (1.0 - frac));
            f << "<rect x=\"" << margin + c * cell << "\" y=\"" << margin + r * cell
              << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade
              << ',' << shade << ",255)\" stroke=\"white\"/>\n";
            f << "<text x=\"" << margin + c * cell + cell / 2 << "\" y=\""
              << margin + r * cell + cell / 2 + 4
              << "\" font-size=\"10\" text-anchor=\"middle\">" << cm.counts[r][c] << "</text>\n";
        }
    }
    for (std::size_t i = 0; i < cm.k; ++i) {
        f << "<text x=\"" << margin + i * cell + cell / 2 << "\" y=\"" << margin - 8
          << "\" font-size=\"10\" text-anchor=\"middle\">c" << i << "</text>\n";
        f << "<text x=\"" << margin - 8 << "\" y=\"" << margin + i * cell + cell / 2 + 4
          << "\" font-size=\"10\" text-anchor=\"end\">c" << i << "</text>\n";
    }
    f << "</svg>\n";
}

inline void write_accuracy_csv(const CvReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_accuracy_csv: cannot open " + path);
    f << "subject,accuracy\n";
    for (std::size_t i = 0; i < report.subject_ids.size(); ++i)
        f << report.subject_ids[i] << ',' << detail::fmt_double(report.subject_accuracy[i])
          << '\n';
    f << "mean," << detail::fmt_double(report.mean_accuracy) << '\n';
    f << "std," << detail::fmt_double(report.std_accuracy) << '\n';
}

// Runs the full pipeline: data -> normalize -> train -> embed ->
// attach-time -> cluster sweep -> features -> classify -> report. Returns the
// manifest JSON, which is also written to <out_dir>/manifest.json.
inline nlohmann::json run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = cfg.seed;
    manifest["config"] = cfg.raw;
    nlohmann::json artifacts = nlohmann::json::object();
    std::string stage = "init";

    auto record = [&](const std::string& name, const std::string& path) {
        artifacts[name] = {{"path", path}, {"digest", file_digest(path)}};
    };

    try {
        stage = "data";
        std::vector<SubjectSeries> raw_series;
        if (cfg.use_synthetic) {
            raw_series = generate_synthetic(cfg.synthetic);
        } else {
            for (const auto& entry : fs::directory_iterator(cfg.data_dir)) {
                if (entry.path().extension() == ".csv")
                    raw_series.push_back(load_series(entry.path().string()));
            }
            std::sort(raw_series.begin(), raw_series.end(),
                      [](const SubjectSeries& a, const SubjectSeries& b) {
                          return a.subject_id < b.subject_id;
                      });
            if (raw_series.empty()) throw std::runtime_error("no series CSVs in " + cfg.data_dir);
        }
        nlohmann::json inputs = nlohmann::json::object();
        for (const auto& s : raw_series) {
            std::string p = out_dir + "/" + s.subject_id + ".csv";
            save_series(s, p);
            inputs[s.subject_id] = file_digest(p);
        }
        manifest["input_digests"] = inputs;

        stage = "normalize";
        std::vector<SubjectSeries> series;
        for (const auto& s : raw_series) series.push_back(normalize(s));

        stage = "train";
        std::vector<Matrix> sources;
        for (const auto& s : series) sources.push_back(s.values);
        TrainResult trained = train(sources, cfg.encoder, cfg.training, out_dir);
        write_loss_trace(trained.trace, out_dir + "/loss_trace.csv");
        record("loss_trace", out_dir + "/loss_trace.csv");
        record("checkpoint_manifest", out_dir + "/ckpt_final.json");
        record("checkpoint_blob", out_dir + "/ckpt_final.bin");

        stage = "embed";
        std::vector<EmbeddingRecord> records;
        std::vector<TimeIndex> time_index;
        std::vector<Window> all_windows;
        std::size_t subject_ordinal = 0;
        for (const auto& s : series) {
            WindowSet ws = make_windows(s, cfg.window_length);
            auto recs = embed_all(trained.params, ws);
            for (std::size_t i = 0; i < recs.size(); ++i) {
                time_index.push_back({subject_ordinal, i, recs[i].seconds_from_bleed < 0.0});
                all_windows.push_back(ws.windows[i]);
            }
            records.insert(records.end(), recs.begin(), recs.end());
            ++subject_ordinal;
        }
        write_embeddings_csv(records, out_dir + "/embeddings.csv");
        record("embeddings", out_dir + "/embeddings.csv");

        stage = "attach-time";
        std::vector<std::vector<double>> points;
        for (const auto& r : records) points.push_back(r.values);
        if (cfg.time_mode != TimeAttachMode::None)
            points = attach_time(points, time_index, cfg.time_mode, cfg.time_scale);

        stage = "cluster";
        std::map<std::size_t, std::vector<int>> labels_by_k;
        for (std::size_t k : cfg.k_values) {
            ClusterAssignment assignment =
                cfg.cluster_method == "kmeans" ? kmeans(points, k, cfg.seed)
                                               : ward_agglomerative(points, k);
            labels_by_k[k] = assignment.labels;
            std::string base = out_dir + "/labels_k" + std::to_string(k);
            write_labels_csv(records, assignment.labels, base + ".csv");
            record("labels_k" + std::to_string(k), base + ".csv");
            ClusterTimeline tl =
                build_timeline(records, assignment.labels, k, cfg.cluster_method);
            write_timeline_csv(tl, base + "_timeline.csv");
            render_timeline_svg(tl, base + "_timeline.svg");
            record("timeline_k" + std::to_string(k) + "_csv", base + "_timeline.csv");
            record("timeline_k" + std::to_string(k) + "_svg", base + "_timeline.svg");
        }

        stage = "features";
        std::vector<std::vector<double>> features;
        std::vector<std::string> window_subjects;
        for (const Window& w : all_windows) {
            features.push_back(extract_features(w));
            window_subjects.push_back(w.subject_id);
        }
        {
            std::ofstream ff(out_dir + "/features.csv");
            auto names = feature_names(series[0].channels);
            ff << "subject_id,window_start";
            for (const auto& n : names) ff << ',' << n;
            ff << '\n';
            for (std::size_t i = 0; i < features.size(); ++i) {
                ff << all_windows[i].subject_id << ',' << all_windows[i].start_idx;
                for (double v : features[i]) ff << ',' << detail::fmt_double(v);
                ff << '\n';
            }
        }
        record("features", out_dir + "/features.csv");

        stage = "classify";
        std::size_t folds = cfg.folds == 0 ? series.size() : cfg.folds;
        ClassifierConfig clf;
        clf.kind = cfg.classify_model == "mlp" ? ClassifierKind::MlpModel
                                               : ClassifierKind::RandomForestModel;
        clf.forest.seed = cfg.seed;
        clf.mlp.seed = cfg.seed;
        nlohmann::json accuracy_by_k = nlohmann::json::object();
        for (std::size_t k : cfg.k_values) {
            CvReport report =
                per_subject_cv(features, labels_by_k[k], window_subjects, folds, clf);
            std::string base = out_dir + "/classify_k" + std::to_string(k);
            write_accuracy_csv(report, base + "_accuracy.csv");
            write_confusion_csv(report.confusion, base + "_confusion.csv");
            render_confusion_svg(report.confusion, base + "_confusion.svg");
            record("accuracy_k" + std::to_string(k), base + "_accuracy.csv");
            record("confusion_k" + std::to_string(k), base + "_confusion.csv");
            record("confusion_svg_k" + std::to_string(k), base + "_confusion.svg");
            accuracy_by_k[std::to_string(k)] = report.mean_accuracy;
        }
        manifest["mean_accuracy_by_k"] = accuracy_by_k;

        stage = "report";
        manifest["artifacts"] = artifacts;
        std::ofstream mf(out_dir + "/manifest.json");
        mf << manifest.dump(2) << '\n';
    } catch (const std::exception& e) {
        throw std::runtime_error("pipeline stage '" + stage + "' failed: " + e.what());
    }
    return manifest;
}

}  // namespace vitalemb
