#pragma once

#include <memory>

#include "common.hpp"

namespace vitalemb {

struct ForestConfig {
    std::size_t num_trees = 100;
    std::size_t max_depth = 12;
    std::size_t min_leaf = 2;
    std::uint64_t seed = 1;
};

namespace detail {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int label = 0;  // majority label at a leaf
};

struct Tree {
    std::vector<TreeNode> nodes;

    int predict(const std::vector<double>& x) const {
        int idx = 0;
        while (nodes[idx].feature >= 0)
            idx = x[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                                : nodes[idx].right;
        return nodes[idx].label;
    }
};

inline double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

}  // namespace detail

// Bagged decision trees with Gini splits on sqrt(F)-sized random feature
// subsets. Prediction is a majority vote; ties break toward the lower label.
class RandomForest {
public:
    RandomForest() = default;

    void fit(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
             const ForestConfig& cfg) {
        if (features.size() != labels.size() || features.empty())
            throw std::invalid_argument("RandomForest::fit: bad inputs");
        num_classes_ = *std::max_element(labels.begin(), labels.end()) + 1;
        cfg_ = cfg;
        single_class_warning_ = false;
        {
            int first = labels[0];
            bool all_same = std::all_of(labels.begin(), labels.end(),
                                        [&](int l) { return l == first; });
            if (all_same) {
                single_class_warning_ = true;
                constant_label_ = first;
                trees_.clear();
                return;
            }
        }
        const std::size_t n = features.size();
        const std::size_t nf = features[0].size();
        std::size_t subset = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(nf))));

        trees_.clear();
        Rng master(cfg.seed);
        for (std::size_t t = 0; t < cfg.num_trees; ++t) {
            Rng rng(master.derive(t + 1));
            std::vector<std::size_t> sample(n);
            for (auto& s : sample) s = static_cast<std::size_t>(rng.next_int(0, n - 1));
            detail::Tree tree;
            build_node(tree, features, labels, sample, 0, subset, rng);
            trees_.push_back(std::move(tree));
        }
    }

    int predict(const std::vector<double>& x) const {
        if (trees_.empty()) return constant_label_;
        std::vector<std::size_t> votes(num_classes_, 0);
        for (const auto& tree : trees_) ++votes[tree.predict(x)];
        return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }

    bool single_class_warning() const { return single_class_warning_; }

private:
    int build_node(detail::Tree& tree, const std::vector<std::vector<double>>& features,
                   const std::vector<int>& labels, const std::vector<std::size_t>& sample,
                   std::size_t depth, std::size_t subset, Rng& rng) {
        std::vector<std::size_t> counts(num_classes_, 0);
        for (std::size_t i : sample) ++counts[labels[i]];
        int majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                        counts.begin());
        double node_gini = detail::gini(counts, sample.size());

        auto make_leaf = [&]() {
            tree.nodes.push_back({-1, 0.0, -1, -1, majority});
            return static_cast<int>(tree.nodes.size() - 1);
        };
        if (depth >= cfg_.max_depth || sample.size() < 2 * cfg_.min_leaf || node_gini == 0.0)
            return make_leaf();

        const std::size_t nf = features[0].size();
        std::vector<std::size_t> feat_ids;
        for (std::size_t j = 0; j < subset; ++j)
            feat_ids.push_back(static_cast<std::size_t>(rng.next_int(0, nf - 1)));

        int best_feat = -1;
        double best_thresh = 0.0, best_score = node_gini;
        for (std::size_t f : feat_ids) {
            std::vector<std::pair<double, int>> vals;
            vals.reserve(sample.size());
            for (std::size_t i : sample) vals.push_back({features[i][f], labels[i]});
            std::sort(vals.begin(), vals.end());
            std::vector<std::size_t> left(num_classes_, 0);
            std::vector<std::size_t> right = counts;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left[vals[i].second];
                --right[vals[i].second];
                if (vals[i].first == vals[i + 1].first) continue;
                std::size_t nl = i + 1, nr = vals.size() - nl;
                if (nl < cfg_.min_leaf || nr < cfg_.min_leaf) continue;
                double score = (static_cast<double>(nl) * detail::gini(left, nl) +
                                static_cast<double>(nr) * detail::gini(right, nr)) /
                               static_cast<double>(vals.size());
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feat = static_cast<int>(f);
                    best_thresh = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (best_feat < 0) return make_leaf();

        std::vector<std::size_t> ls, rs;
        for (std::size_t i : sample)
            (features[i][best_feat] <= best_thresh ? ls : rs).push_back(i);
        if (ls.empty() || rs.empty()) return make_leaf();

        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({best_feat, best_thresh, -1, -1, majority});
        int l = build_node(tree, features, labels, ls, depth + 1, subset, rng);
        int r = build_node(tree, features, labels, rs, depth + 1, subset, rng);
        tree.nodes[idx].left = l;
        tree.nodes[idx].right = r;
        return idx;
    }

    std::vector<detail::Tree> trees_;
    std::size_t num_classes_ = 0;
    ForestConfig cfg_;
    bool single_class_warning_ = false;
    int constant_label_ = 0;
};

}  // namespace vitalemb
