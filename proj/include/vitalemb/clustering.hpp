#pragma once

#include <queue>
#include <tuple>

#include "common.hpp"

namespace vitalemb {

enum class ClusterMethod { WardAgglomerative, KMeans };

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<int> labels;  // one per input point, in [0, k)
    ClusterMethod method = ClusterMethod::WardAgglomerative;
};

struct Merge {
    std::size_t cluster_a;
    std::size_t cluster_b;
    double ward_cost;  // increase in total within-cluster sum of squares
    std::size_t new_size;
};

struct Dendrogram {
    std::vector<Merge> merges;  // n-1 entries
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// Relabel so cluster ids appear in order of first occurrence along the input.
inline void relabel_by_first_appearance(std::vector<int>& labels, std::size_t k) {
    std::vector<int> remap(k, -1);
    int next = 0;
    for (int& lab : labels) {
        if (remap[lab] < 0) remap[lab] = next++;
        lab = remap[lab];
    }
}

}  // namespace detail

// Exact O(n^2 log n) Ward agglomeration. Pair costs are maintained with the
// Lance-Williams update and a lazy priority queue; every merge is the global
// minimum increase in within-cluster sum of squares.
inline ClusterAssignment ward_agglomerative(const std::vector<std::vector<double>>& points,
                                            std::size_t k, Dendrogram* dendrogram = nullptr) {
    const std::size_t n = points.size();
    if (n < 1) throw std::invalid_argument("ward_agglomerative: no points");
    if (k < 1 || k > n) throw std::invalid_argument("ward_agglomerative: need 1 <= k <= n");

    std::vector<std::size_t> size(n, 1);
    std::vector<bool> alive(n, true);
    std::vector<std::size_t> version(n, 0);
    // Ward cost of merging singletons i and j is ||x_i - x_j||^2 / 2.
    std::vector<std::vector<double>> cost(n);
    for (std::size_t i = 0; i < n; ++i) {
        cost[i].resize(n, 0.0);
        for (std::size_t j = 0; j < i; ++j) {
            double c = detail::sq_dist(points[i], points[j]) * 0.5;
            cost[i][j] = c;
            cost[j][i] = c;
        }
    }

    struct Entry {
        double cost;
        std::size_t a, b;
        std::size_t va, vb;
        bool operator>(const Entry& o) const { return cost > o.cost; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) queue.push({cost[i][j], i, j, 0, 0});

    // Union-find style parent map so final labels can be read off.
    std::vector<std::size_t> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = i;

    std::size_t clusters = n;
    Dendrogram dendro;
    while (clusters > k) {
        Entry e = queue.top();
        queue.pop();
        if (!alive[e.a] || !alive[e.b] || version[e.a] != e.va || version[e.b] != e.vb)
            continue;  // stale
        std::size_t a = e.a, b = e.b;
        // Merge b into a; Lance-Williams Ward update for all other clusters.
        double d_ab = cost[a][b];
        std::size_t na = size[a], nb = size[b];
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c] || c == a || c == b) continue;
            std::size_t nc = size[c];
            double updated = ((static_cast<double>(na + nc)) * cost[a][c] +
                              (static_cast<double>(nb + nc)) * cost[b][c] -
                              static_cast<double>(nc) * d_ab) /
                             static_cast<double>(na + nb + nc);
            cost[a][c] = updated;
            cost[c][a] = updated;
        }
        alive[b] = false;
        size[a] = na + nb;
        ++version[a];
        for (std::size_t i = 0; i < n; ++i)
            if (owner[i] == b) owner[i] = a;
        dendro.merges.push_back({a, b, d_ab, size[a]});
        --clusters;
        for (std::size_t c = 0; c < n; ++c)
            if (alive[c] && c != a)
                queue.push({cost[std::min(a, c)][std::max(a, c)], std::min(a, c), std::max(a, c),
                            version[std::min(a, c)], version[std::max(a, c)]});
    }

    ClusterAssignment out;
    out.k = k;
    out.method = ClusterMethod::WardAgglomerative;
    std::vector<int> compact(n, -1);
    int next = 0;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = owner[i];
        if (compact[root] < 0) compact[root] = next++;
        out.labels[i] = compact[root];
    }
    detail::relabel_by_first_appearance(out.labels, k);
    if (dendrogram) *dendrogram = std::move(dendro);
    return out;
}

// k-means++ seeding followed by Lloyd iterations. Empty clusters are reseeded
// to the point farthest from its current center.
inline ClusterAssignment kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                                std::uint64_t seed, std::size_t max_iter = 300) {
    const std::size_t n = points.size();
    if (n < 1) throw std::invalid_argument("kmeans: no points");
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= n");
    const std::size_t dim = points[0].size();

    Rng rng(seed);
    std::vector<std::vector<double>> centers;
    centers.push_back(points[static_cast<std::size_t>(rng.next_int(0, n - 1))]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = detail::sq_dist(points[i], centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c)
                best = std::min(best, detail::sq_dist(points[i], centers[c]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All remaining points coincide with a center.
            centers.push_back(points[static_cast<std::size_t>(rng.next_int(0, n - 1))]);
            continue;
        }
        double target = rng.next_double() * total;
        std::size_t pick = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centers.push_back(points[pick]);
    }

    std::vector<int> labels(n, 0);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = detail::sq_dist(points[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double d = detail::sq_dist(points[i], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[labels[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed to the point farthest from its assigned center.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = detail::sq_dist(points[i], centers[labels[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers[c] = points[far];
                labels[far] = static_cast<int>(c);
                changed = true;
            } else {
                for (std::size_t d = 0; d < dim; ++d)
                    centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
            }
        }
        if (!changed) break;
    }

    ClusterAssignment out;
    out.k = k;
    out.method = ClusterMethod::KMeans;
    out.labels = std::move(labels);
    detail::relabel_by_first_appearance(out.labels, k);
    return out;
}

inline double kmeans_objective(const std::vector<std::vector<double>>& points,
                               const std::vector<int>& labels, std::size_t k) {
    const std::size_t dim = points.empty() ? 0 : points[0].size();
    std::vector<std::vector<double>> centers(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        ++counts[labels[i]];
        for (std::size_t d = 0; d < dim; ++d) centers[labels[i]][d] += points[i][d];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c])
            for (std::size_t d = 0; d < dim; ++d) centers[c][d] /= static_cast<double>(counts[c]);
    double obj = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        obj += detail::sq_dist(points[i], centers[labels[i]]);
    return obj;
}

// Adjusted Rand index from the pair-counting contingency table.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("adjusted_rand_index: empty labelings");
    int ka = *std::max_element(a.begin(), a.end()) + 1;
    int kb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
    for (std::size_t i = 0; i < n; ++i) ++table[a[i]][b[i]];

    auto choose2 = [](long long m) { return m * (m - 1) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < ka; ++i) {
        long long row = 0;
        for (int j = 0; j < kb; ++j) {
            sum_ij += choose2(table[i][j]);
            row += table[i][j];
        }
        sum_a += choose2(row);
    }
    for (int j = 0; j < kb; ++j) {
        long long col = 0;
        for (int i = 0; i < ka; ++i) col += table[i][j];
        sum_b += choose2(col);
    }
    double total_pairs = choose2(static_cast<long long>(n));
    double expected = sum_a * sum_b / total_pairs;
    double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both labelings trivial
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace vitalemb
