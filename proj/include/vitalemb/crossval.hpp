#pragma once

#include <functional>
#include <map>
#include <set>

#include "forest.hpp"
#include "mlp.hpp"

namespace vitalemb {

struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<std::vector<long long>> counts;  // rows true, columns predicted

    explicit ConfusionMatrix(std::size_t k_ = 0)
        : k(k_), counts(k_, std::vector<long long>(k_, 0)) {}

    long long total() const {
        long long t = 0;
        for (const auto& row : counts)
            for (long long c : row) t += c;
        return t;
    }
};

struct CvReport {
    std::vector<std::string> fold_subjects;  // test subjects per fold, ';'-joined
    std::vector<double> subject_accuracy;    // one per subject, subject order
    std::vector<std::string> subject_ids;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    ConfusionMatrix confusion;
};

enum class ClassifierKind { RandomForestModel, MlpModel };

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::RandomForestModel;
    ForestConfig forest;
    MlpConfig mlp;
};

using FoldPredictor = std::function<std::vector<int>(
    const std::vector<std::vector<double>>& train_x, const std::vector<int>& train_y,
    const std::vector<std::vector<double>>& test_x)>;

// Grouped cross-validation where folds partition the subject set; every
// window of a held-out subject is excluded from that fold's training data.
inline CvReport per_subject_cv_with(const std::vector<std::vector<double>>& features,
                                    const std::vector<int>& labels,
                                    const std::vector<std::string>& subjects,
                                    std::size_t num_folds, const FoldPredictor& predictor) {
    if (features.size() != labels.size() || features.size() != subjects.size())
        throw std::invalid_argument("per_subject_cv: length mismatch");
    std::vector<std::string> unique;
    for (const auto& s : subjects)
        if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(s);
    if (num_folds < 2 || num_folds > unique.size())
        throw std::invalid_argument("per_subject_cv: need 2 <= folds <= num subjects");

    std::size_t k = static_cast<std::size_t>(
        *std::max_element(labels.begin(), labels.end()) + 1);
    CvReport report;
    report.confusion = ConfusionMatrix(k);
    report.subject_ids = unique;
    std::map<std::string, std::pair<long long, long long>> subject_hits;  // correct, total

    // Deal subjects round-robin into folds; 16 subjects / 16 folds is then
    // leave-one-subject-out.
    std::vector<std::vector<std::string>> folds(num_folds);
    for (std::size_t i = 0; i < unique.size(); ++i) folds[i % num_folds].push_back(unique[i]);

    std::set<std::string> seen_test;
    for (std::size_t f = 0; f < num_folds; ++f) {
        std::set<std::string> test_set(folds[f].begin(), folds[f].end());
        for (const auto& s : test_set) {
            if (seen_test.count(s))
                throw std::logic_error("per_subject_cv: subject in multiple test folds");
            seen_test.insert(s);
        }
        std::string joined;
        for (const auto& s : folds[f]) {
            if (!joined.empty()) joined += ';';
            joined += s;
        }
        report.fold_subjects.push_back(joined);

        std::vector<std::vector<double>> train_x, test_x;
        std::vector<int> train_y, test_y;
        std::vector<std::string> test_subj;
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (test_set.count(subjects[i])) {
                test_x.push_back(features[i]);
                test_y.push_back(labels[i]);
                test_subj.push_back(subjects[i]);
            } else {
                train_x.push_back(features[i]);
                train_y.push_back(labels[i]);
            }
        }
        if (train_x.empty() || test_x.empty())
            throw std::runtime_error("per_subject_cv: empty train or test fold");

        std::vector<int> predictions = predictor(train_x, train_y, test_x);
        if (predictions.size() != test_x.size())
            throw std::logic_error("per_subject_cv: predictor returned wrong count");

        for (std::size_t i = 0; i < test_x.size(); ++i) {
            int t = test_y[i], p = predictions[i];
            if (t >= 0 && p >= 0 && static_cast<std::size_t>(t) < k &&
                static_cast<std::size_t>(p) < k)
                ++report.confusion.counts[t][p];
            auto& hits = subject_hits[test_subj[i]];
            if (t == p) ++hits.first;
            ++hits.second;
        }
    }
    if (seen_test.size() != unique.size())
        throw std::logic_error("per_subject_cv: test folds do not cover all subjects");

    for (const auto& s : unique) {
        auto& hits = subject_hits[s];
        report.subject_accuracy.push_back(static_cast<double>(hits.first) /
                                          static_cast<double>(hits.second));
    }
    report.mean_accuracy = mean_of(report.subject_accuracy);
    report.std_accuracy = std_of(report.subject_accuracy);
    return report;
}

inline CvReport per_subject_cv(const std::vector<std::vector<double>>& features,
                               const std::vector<int>& labels,
                               const std::vector<std::string>& subjects, std::size_t num_folds,
                               const ClassifierConfig& cfg) {
    FoldPredictor predictor = [&cfg](const std::vector<std::vector<double>>& train_x,
                                     const std::vector<int>& train_y,
                                     const std::vector<std::vector<double>>& test_x) {
        std::vector<int> predictions(test_x.size());
        if (cfg.kind == ClassifierKind::RandomForestModel) {
            RandomForest model;
            model.fit(train_x, train_y, cfg.forest);
            for (std::size_t i = 0; i < test_x.size(); ++i)
                predictions[i] = model.predict(test_x[i]);
        } else {
            MlpClassifier model;
            model.fit(train_x, train_y, cfg.mlp);
            for (std::size_t i = 0; i < test_x.size(); ++i)
                predictions[i] = model.predict(test_x[i]);
        }
        return predictions;
    };
    return per_subject_cv_with(features, labels, subjects, num_folds, predictor);
}

}  // namespace vitalemb
