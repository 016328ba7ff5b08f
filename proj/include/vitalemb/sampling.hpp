#pragma once

#include "common.hpp"

namespace vitalemb {

enum class SamplerScheme { CrossSubject, WithinSubject };

inline SamplerScheme parse_scheme(const std::string& s) {
    if (s == "cross" || s == "cross-subject") return SamplerScheme::CrossSubject;
    if (s == "within" || s == "within-subject") return SamplerScheme::WithinSubject;
    throw std::invalid_argument("unknown sampler scheme '" + s + "'");
}

// Half-open span [start, start+length) of timesteps within a source.
struct Span {
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t end() const { return start + length; }
    bool disjoint_from(const Span& o) const { return end() <= o.start || o.end() <= start; }
    bool contains(const Span& o) const { return o.start >= start && o.end() <= end(); }
};

struct NegativeSample {
    std::size_t source = 0;  // batch index of the source sequence
    Span span;
};

struct TripletItem {
    std::size_t source = 0;
    Span reference;
    Span positive;
    std::vector<NegativeSample> negatives;  // exactly K per item
};

struct TripletBatch {
    std::vector<TripletItem> items;
};

struct SamplerConfig {
    std::size_t negatives_per_item = 2;  // K
    SamplerScheme scheme = SamplerScheme::CrossSubject;
    std::size_t min_length = 16;
    std::size_t max_length = 0;  // 0 = uncapped
};

// Start positions where a length-neg_len subseries fits entirely before or
// entirely after ref within a source of source_len timesteps.
inline std::size_t placement_count(std::size_t source_len, const Span& ref, std::size_t neg_len) {
    if (neg_len < 1) throw std::invalid_argument("placement_count: neg_len must be >= 1");
    std::size_t count = 0;
    if (ref.start >= neg_len) count += ref.start - neg_len + 1;
    if (source_len >= neg_len && source_len - neg_len >= ref.end())
        count += source_len - neg_len - ref.end() + 1;
    return count;
}

namespace detail {

// nth valid disjoint placement, in increasing start order.
inline std::size_t nth_placement(std::size_t source_len, const Span& ref, std::size_t neg_len,
                                 std::size_t n) {
    std::size_t before = ref.start >= neg_len ? ref.start - neg_len + 1 : 0;
    if (n < before) return n;
    return ref.end() + (n - before);
}

inline std::size_t max_gap(std::size_t source_len, const Span& ref) {
    std::size_t after = source_len - ref.end();
    return std::max(ref.start, after);
}

}  // namespace detail

// Reference/positive/negative spans for one gradient step. Each source in the
// batch yields one reference with a contained positive; the K*N negatives are
// dealt K per item and are always disjoint from their own source's reference.
inline TripletBatch sample_triplets(const std::vector<std::size_t>& source_lengths,
                                    const SamplerConfig& cfg, std::uint64_t seed) {
    const std::size_t n = source_lengths.size();
    const std::size_t min_len = cfg.min_length;
    if (n < 1) throw std::invalid_argument("sample_triplets: empty batch");
    if (cfg.negatives_per_item < 1) throw std::invalid_argument("sample_triplets: K must be >= 1");
    if (min_len < 1) throw std::invalid_argument("sample_triplets: min_length must be >= 1");
    for (std::size_t i = 0; i < n; ++i)
        if (source_lengths[i] < 2 * min_len)
            throw std::invalid_argument("sample_triplets: source " + std::to_string(i) +
                                        " shorter than 2*min_length");

    auto cap_len = [&](std::size_t len) {
        std::size_t c = len - min_len;  // leaves room for a disjoint negative
        if (cfg.max_length > 0) c = std::min(c, cfg.max_length);
        return std::max(c, min_len);
    };

    Rng rng(seed);
    TripletBatch batch;
    batch.items.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        TripletItem& item = batch.items[i];
        item.source = i;
        std::size_t len = source_lengths[i];
        std::size_t ref_len =
            static_cast<std::size_t>(rng.next_int(min_len, cap_len(len)));
        // Reference position uniform over starts that leave a gap of at least
        // min_length on one side, so a disjoint negative is always placeable.
        std::size_t last = len - ref_len;
        std::size_t lo_band_end = len >= ref_len + min_len ? len - ref_len - min_len : 0;
        std::vector<std::pair<std::size_t, std::size_t>> ranges;  // inclusive
        if (len >= ref_len + min_len) ranges.push_back({0, lo_band_end});
        if (last >= min_len)
            ranges.push_back({std::max(min_len, ranges.empty() ? 0 : ranges[0].second + 1), last});
        std::size_t total = 0;
        for (auto& r : ranges) total += r.second - r.first + 1;
        std::size_t pick = static_cast<std::size_t>(rng.next_int(0, total - 1));
        std::size_t ref_start = 0;
        for (auto& r : ranges) {
            std::size_t span = r.second - r.first + 1;
            if (pick < span) {
                ref_start = r.first + pick;
                break;
            }
            pick -= span;
        }
        item.reference = {ref_start, ref_len};

        std::size_t pos_len = static_cast<std::size_t>(rng.next_int(min_len, ref_len));
        std::size_t pos_start = static_cast<std::size_t>(
            rng.next_int(ref_start, ref_start + ref_len - pos_len));
        item.positive = {pos_start, pos_len};
    }

    // K*N negatives in sampling order, K dealt to each item in turn.
    for (std::size_t m = 0; m < cfg.negatives_per_item * n; ++m) {
        std::size_t item_idx = m / cfg.negatives_per_item;
        std::size_t src;
        if (cfg.scheme == SamplerScheme::WithinSubject)
            src = batch.items[item_idx].source;
        else
            src = static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(n) - 1));

        const Span& ref = batch.items[src].reference;
        std::size_t len = source_lengths[src];
        std::size_t gap = detail::max_gap(len, ref);
        std::size_t neg_max = gap;
        if (cfg.max_length > 0) neg_max = std::min(neg_max, cfg.max_length);
        std::size_t neg_len = static_cast<std::size_t>(rng.next_int(min_len, neg_max));
        std::size_t count = placement_count(len, ref, neg_len);
        std::size_t pick = static_cast<std::size_t>(rng.next_int(0, count - 1));
        NegativeSample neg;
        neg.source = src;
        neg.span = {detail::nth_placement(len, ref, neg_len, pick), neg_len};
        batch.items[item_idx].negatives.push_back(neg);
    }
    return batch;
}

// Extract the values of a span as a standalone matrix.
inline Matrix slice_span(const Matrix& source, const Span& span) {
    if (span.end() > source.cols) throw std::out_of_range("slice_span: span exceeds source");
    Matrix out(source.rows, span.length);
    for (std::size_t c = 0; c < source.rows; ++c)
        for (std::size_t t = 0; t < span.length; ++t) out(c, t) = source(c, span.start + t);
    return out;
}

}  // namespace vitalemb
