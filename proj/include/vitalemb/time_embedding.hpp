#pragma once

#include "common.hpp"

namespace vitalemb {

enum class TimeAttachMode { None, FullSequence, FromBleedStart };

inline TimeAttachMode parse_time_mode(const std::string& s) {
    if (s == "none") return TimeAttachMode::None;
    if (s == "full") return TimeAttachMode::FullSequence;
    if (s == "from-bleed") return TimeAttachMode::FromBleedStart;
    throw std::invalid_argument("unknown time attachment mode '" + s + "'");
}

// Transformer-style sinusoid: component 2i = sin(pos / 10000^(2i/dim)),
// component 2i+1 = cos of the same argument.
inline std::vector<double> sinusoidal_embedding(double position, std::size_t dim) {
    if (dim % 2 != 0) throw std::invalid_argument("sinusoidal_embedding: dim must be even");
    if (position < 0.0) throw std::invalid_argument("sinusoidal_embedding: negative position");
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim / 2; ++i) {
        double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(dim));
        out[2 * i] = std::sin(position * freq);
        out[2 * i + 1] = std::cos(position * freq);
    }
    return out;
}

// Per-embedding metadata needed to derive positions.
struct TimeIndex {
    std::size_t subject = 0;       // subject ordinal
    std::size_t window_index = 0;  // window ordinal from record start, per subject
    bool prebleed = false;
};

// Adds a scaled sinusoidal position vector to each embedding. The scale is
// chosen so every added component stays strictly below
// scale_factor * (std over all embedding components).
inline std::vector<std::vector<double>> attach_time(
    const std::vector<std::vector<double>>& embeddings, const std::vector<TimeIndex>& index,
    TimeAttachMode mode, double scale_factor = 2.0) {
    if (embeddings.empty()) throw std::invalid_argument("attach_time: empty embedding set");
    if (embeddings.size() != index.size())
        throw std::invalid_argument("attach_time: index length mismatch");
    if (mode == TimeAttachMode::None) return embeddings;

    const std::size_t dim = embeddings[0].size();
    if (dim % 2 != 0) throw std::invalid_argument("attach_time: embedding dim must be even");

    std::vector<double> all;
    for (const auto& e : embeddings) all.insert(all.end(), e.begin(), e.end());
    double sigma = std_of(all);

    // Positions per embedding: window index from record start, or window
    // index since bleed with all prebleed windows pinned to position 0.
    std::vector<double> positions(embeddings.size(), 0.0);
    std::vector<std::size_t> bleed_offset;  // first non-prebleed window index per subject
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (mode == TimeAttachMode::FullSequence) {
            positions[i] = static_cast<double>(index[i].window_index);
        } else {
            if (index[i].prebleed) {
                positions[i] = 0.0;
            } else {
                if (index[i].subject >= bleed_offset.size())
                    bleed_offset.resize(index[i].subject + 1, SIZE_MAX);
                if (bleed_offset[index[i].subject] == SIZE_MAX)
                    bleed_offset[index[i].subject] = index[i].window_index;
                positions[i] =
                    static_cast<double>(index[i].window_index - bleed_offset[index[i].subject]);
            }
        }
    }

    std::vector<std::vector<double>> pos_vecs(embeddings.size());
    double max_comp = 0.0;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        pos_vecs[i] = sinusoidal_embedding(positions[i], dim);
        for (double v : pos_vecs[i]) max_comp = std::max(max_comp, std::fabs(v));
    }
    if (max_comp == 0.0) max_comp = 1.0;
    double scale = scale_factor * sigma * (1.0 - 1e-9) / max_comp;

    std::vector<std::vector<double>> out = embeddings;
    for (std::size_t i = 0; i < embeddings.size(); ++i)
        for (std::size_t d = 0; d < dim; ++d) out[i][d] += scale * pos_vecs[i][d];
    return out;
}

}  // namespace vitalemb
