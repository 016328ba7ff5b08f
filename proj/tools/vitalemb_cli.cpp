// Command-line front end for the embedding/clustering pipeline.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "vitalemb/run.hpp"

namespace fs = std::filesystem;
using namespace vitalemb;

namespace {

std::vector<SubjectSeries> load_dir(const std::string& dir) {
    std::vector<SubjectSeries> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv" &&
            entry.path().string().find(".labels") == std::string::npos)
            out.push_back(load_series(entry.path().string()));
    std::sort(out.begin(), out.end(), [](const SubjectSeries& a, const SubjectSeries& b) {
        return a.subject_id < b.subject_id;
    });
    if (out.empty()) throw std::runtime_error("no series CSVs in " + dir);
    return out;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised vital-sign embedding, clustering and explainability pipeline"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out = "out";
    app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (evaluation is deterministic)")
        ->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate synthetic subject series");
    std::string gen_config;
    gen->add_option("--config", gen_config, "synthetic config JSON")->required();

    // train
    auto* tr = app.add_subcommand("train", "train the encoder on a data directory");
    std::string tr_data, tr_enc_cfg, tr_train_cfg;
    tr->add_option("--data", tr_data, "directory of series CSVs")->required();
    tr->add_option("--enc-config", tr_enc_cfg, "encoder config JSON");
    tr->add_option("--train-config", tr_train_cfg, "training config JSON");

    // embed
    auto* em = app.add_subcommand("embed", "embed all windows with a checkpoint");
    std::string em_data, em_ckpt;
    std::size_t em_window = 120;
    em->add_option("--data", em_data, "directory of series CSVs")->required();
    em->add_option("--checkpoint", em_ckpt, "checkpoint prefix (without .json/.bin)")->required();
    em->add_option("--window", em_window, "window length in timesteps")->capture_default_str();

    // attach-time
    auto* at = app.add_subcommand("attach-time", "add sinusoidal time embeddings");
    std::string at_embeddings, at_mode = "full";
    double at_scale = 2.0;
    at->add_option("--embeddings", at_embeddings, "embeddings CSV")->required();
    at->add_option("--mode", at_mode, "none|full|from-bleed")->capture_default_str();
    at->add_option("--scale", at_scale, "standard-deviation bound factor")->capture_default_str();

    // cluster
    auto* cl = app.add_subcommand("cluster", "cluster embeddings");
    std::string cl_embeddings, cl_method = "ward";
    std::size_t cl_k = 10;
    cl->add_option("--embeddings", cl_embeddings, "embeddings CSV")->required();
    cl->add_option("--method", cl_method, "ward|kmeans")->capture_default_str();
    cl->add_option("--k", cl_k, "number of clusters")->capture_default_str();

    // features
    auto* fe = app.add_subcommand("features", "extract explainable window features");
    std::string fe_data;
    std::size_t fe_window = 120;
    fe->add_option("--data", fe_data, "directory of series CSVs")->required();
    fe->add_option("--window", fe_window, "window length in timesteps")->capture_default_str();

    // classify
    auto* cf = app.add_subcommand("classify", "predict cluster labels from features");
    std::string cf_features, cf_labels, cf_model = "rf";
    std::size_t cf_folds = 0;
    cf->add_option("--features", cf_features, "features CSV")->required();
    cf->add_option("--labels", cf_labels, "labels CSV")->required();
    cf->add_option("--model", cf_model, "rf|mlp")->capture_default_str();
    cf->add_option("--folds", cf_folds, "folds over subjects (0 = one per subject)")
        ->capture_default_str();

    // crossval
    auto* cv = app.add_subcommand("crossval", "encoder robustness cross-validation");
    std::string cv_data, cv_enc_cfg, cv_train_cfg;
    std::size_t cv_folds = 4, cv_k = 10, cv_window = 120;
    cv->add_option("--data", cv_data, "directory of series CSVs")->required();
    cv->add_option("--enc-config", cv_enc_cfg, "encoder config JSON");
    cv->add_option("--train-config", cv_train_cfg, "training config JSON");
    cv->add_option("--folds", cv_folds, "number of folds")->capture_default_str();
    cv->add_option("--k", cv_k, "clusters per fold timeline")->capture_default_str();
    cv->add_option("--window", cv_window, "window length")->capture_default_str();

    // report
    auto* rp = app.add_subcommand("report", "render a timeline from a labels CSV");
    std::string rp_labels;
    rp->add_option("--labels", rp_labels, "labels CSV")->required();

    // run
    auto* rn = app.add_subcommand("run", "full pipeline from a config JSON");
    std::string rn_config;
    rn->add_option("--config", rn_config, "pipeline config JSON (or a previous manifest)")
        ->required();

    CLI11_PARSE(app, argc, argv);
    (void)threads;  // evaluation is sequential; the flag is accepted for compatibility

    try {
        fs::create_directories(out);

        if (*gen) {
            SyntheticConfig cfg = synthetic_config_from_json(read_json(gen_config));
            auto series = generate_synthetic(cfg);
            nlohmann::json manifest;
            manifest["tool_version"] = kToolVersion;
            manifest["config"] = synthetic_config_to_json(cfg);
            nlohmann::json files = nlohmann::json::object();
            for (const auto& s : series) {
                std::string p = out + "/" + s.subject_id + ".csv";
                save_series(s, p);
                files[s.subject_id] = {{"path", p}, {"digest", file_digest(p)}};
            }
            manifest["files"] = files;
            std::ofstream mf(out + "/manifest.json");
            mf << manifest.dump(2) << '\n';
            std::cout << "wrote " << series.size() << " subjects to " << out << "\n";
        } else if (*tr) {
            EncoderConfig enc = tr_enc_cfg.empty() ? EncoderConfig{}
                                                   : encoder_config_from_json(read_json(tr_enc_cfg));
            TrainConfig tcfg = tr_train_cfg.empty()
                                   ? TrainConfig{}
                                   : train_config_from_json(read_json(tr_train_cfg));
            if (tr_train_cfg.empty()) tcfg.seed = seed;
            auto series = load_dir(tr_data);
            std::vector<Matrix> sources;
            for (const auto& s : series) sources.push_back(normalize(s).values);
            enc.in_channels = series[0].num_channels();
            TrainResult result = train(sources, enc, tcfg, out);
            write_loss_trace(result.trace, out + "/loss_trace.csv");
            std::cout << "final loss " << result.trace.back().loss << ", checkpoint in " << out
                      << "\n";
        } else if (*em) {
            EncoderParams params = load_checkpoint(em_ckpt);
            auto series = load_dir(em_data);
            std::vector<EmbeddingRecord> records;
            for (const auto& s : series) {
                WindowSet ws = make_windows(normalize(s), em_window);
                auto recs = embed_all(params, ws);
                records.insert(records.end(), recs.begin(), recs.end());
            }
            write_embeddings_csv(records, out + "/embeddings.csv");
            std::cout << "wrote " << records.size() << " embeddings\n";
        } else if (*at) {
            auto records = read_embeddings_csv(at_embeddings);
            std::vector<std::vector<double>> points;
            std::vector<TimeIndex> index;
            std::map<std::string, std::size_t> subject_ord;
            std::map<std::string, std::size_t> window_ord;
            for (const auto& r : records) {
                if (!subject_ord.count(r.subject_id))
                    subject_ord[r.subject_id] = subject_ord.size();
                index.push_back({subject_ord[r.subject_id], window_ord[r.subject_id]++,
                                 r.seconds_from_bleed < 0.0});
                points.push_back(r.values);
            }
            auto shifted = attach_time(points, index, parse_time_mode(at_mode), at_scale);
            for (std::size_t i = 0; i < records.size(); ++i) records[i].values = shifted[i];
            write_embeddings_csv(records, out + "/embeddings_time.csv");
            std::cout << "wrote " << records.size() << " time-attached embeddings\n";
        } else if (*cl) {
            auto records = read_embeddings_csv(cl_embeddings);
            std::vector<std::vector<double>> points;
            for (const auto& r : records) points.push_back(r.values);
            ClusterAssignment assignment = cl_method == "kmeans"
                                               ? kmeans(points, cl_k, seed)
                                               : ward_agglomerative(points, cl_k);
            write_labels_csv(records, assignment.labels, out + "/labels.csv");
            std::cout << "wrote labels for k=" << cl_k << "\n";
        } else if (*fe) {
            auto series = load_dir(fe_data);
            std::ofstream ff(out + "/features.csv");
            ff << "subject_id,window_start";
            for (const auto& n : feature_names(series[0].channels)) ff << ',' << n;
            ff << '\n';
            std::size_t count = 0;
            for (const auto& s : series) {
                WindowSet ws = make_windows(normalize(s), fe_window);
                for (const Window& w : ws.windows) {
                    ff << w.subject_id << ',' << w.start_idx;
                    for (double v : extract_features(w)) ff << ',' << detail::fmt_double(v);
                    ff << '\n';
                    ++count;
                }
            }
            std::cout << "wrote " << count << " feature rows\n";
        } else if (*cf) {
            // Join features and labels on (subject, window_start).
            std::ifstream ffi(cf_features);
            if (!ffi) throw std::runtime_error("cannot open " + cf_features);
            std::string line;
            std::getline(ffi, line);
            std::vector<std::vector<double>> features;
            std::vector<std::string> subjects;
            std::map<std::pair<std::string, std::size_t>, std::size_t> row_of;
            while (std::getline(ffi, line)) {
                if (line.empty()) continue;
                std::istringstream ls(line);
                std::string subj, cell;
                std::getline(ls, subj, ',');
                std::getline(ls, cell, ',');
                std::size_t start = std::stoull(cell);
                std::vector<double> row;
                while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
                row_of[{subj, start}] = features.size();
                features.push_back(std::move(row));
                subjects.push_back(subj);
            }
            std::ifstream lfi(cf_labels);
            if (!lfi) throw std::runtime_error("cannot open " + cf_labels);
            std::getline(lfi, line);
            std::vector<int> labels(features.size(), -1);
            while (std::getline(lfi, line)) {
                if (line.empty()) continue;
                std::istringstream ls(line);
                std::string subj, cell;
                std::getline(ls, subj, ',');
                std::getline(ls, cell, ',');
                std::size_t start = std::stoull(cell);
                std::getline(ls, cell, ',');  // seconds_from_bleed
                std::getline(ls, cell, ',');
                auto it = row_of.find({subj, start});
                if (it == row_of.end())
                    throw std::runtime_error("label row without matching feature row");
                labels[it->second] = std::stoi(cell);
            }
            for (int l : labels)
                if (l < 0) throw std::runtime_error("feature row without label");
            ClassifierConfig clf;
            clf.kind = cf_model == "mlp" ? ClassifierKind::MlpModel
                                         : ClassifierKind::RandomForestModel;
            clf.forest.seed = seed;
            clf.mlp.seed = seed;
            std::size_t folds = cf_folds;
            if (folds == 0) {
                std::set<std::string> uniq(subjects.begin(), subjects.end());
                folds = uniq.size();
            }
            CvReport report = per_subject_cv(features, labels, subjects, folds, clf);
            write_accuracy_csv(report, out + "/accuracy.csv");
            write_confusion_csv(report.confusion, out + "/confusion.csv");
            render_confusion_svg(report.confusion, out + "/confusion.svg");
            std::cout << "mean accuracy " << report.mean_accuracy << " (std "
                      << report.std_accuracy << ")\n";
        } else if (*cv) {
            EncoderConfig enc = cv_enc_cfg.empty() ? EncoderConfig{}
                                                   : encoder_config_from_json(read_json(cv_enc_cfg));
            TrainConfig tcfg = cv_train_cfg.empty()
                                   ? TrainConfig{}
                                   : train_config_from_json(read_json(cv_train_cfg));
            if (cv_train_cfg.empty()) tcfg.seed = seed;
            auto raw = load_dir(cv_data);
            std::vector<SubjectSeries> series;
            for (const auto& s : raw) series.push_back(normalize(s));
            enc.in_channels = series[0].num_channels();
            EncoderCvResult result = encoder_cv(series, enc, tcfg, cv_window, cv_k, cv_folds);
            for (std::size_t f = 0; f < result.fold_timelines.size(); ++f) {
                std::string base = out + "/fold" + std::to_string(f + 1);
                write_timeline_csv(result.fold_timelines[f], base + "_timeline.csv");
                render_timeline_svg(result.fold_timelines[f], base + "_timeline.svg");
            }
            std::cout << "wrote " << result.fold_timelines.size() << " fold timelines\n";
        } else if (*rp) {
            std::ifstream lfi(rp_labels);
            if (!lfi) throw std::runtime_error("cannot open " + rp_labels);
            std::string line;
            std::getline(lfi, line);
            ClusterTimeline tl;
            tl.method = "labels";
            int max_label = 0;
            while (std::getline(lfi, line)) {
                if (line.empty()) continue;
                std::istringstream ls(line);
                std::string subj, cell;
                std::getline(ls, subj, ',');
                std::getline(ls, cell, ',');  // window_start
                std::getline(ls, cell, ',');
                double sec = std::stod(cell);
                std::getline(ls, cell, ',');
                int lab = std::stoi(cell);
                max_label = std::max(max_label, lab);
                tl.by_subject[subj].push_back({sec, lab, false});
            }
            tl.k = static_cast<std::size_t>(max_label) + 1;
            write_timeline_csv(tl, out + "/timeline.csv");
            render_timeline_svg(tl, out + "/timeline.svg");
            std::cout << "wrote timeline for " << tl.by_subject.size() << " subjects\n";
        } else if (*rn) {
            nlohmann::json j = read_json(rn_config);
            // A previous manifest can be replayed directly.
            if (j.contains("config") && j.contains("tool_version")) j = j.at("config");
            if (!j.contains("seed")) j["seed"] = seed;
            PipelineConfig cfg = pipeline_config_from_json(j);
            nlohmann::json manifest = run_pipeline(cfg, out);
            std::cout << "pipeline complete; manifest at " << out << "/manifest.json\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
