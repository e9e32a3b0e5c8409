#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pairlearn/error.hpp"
#include "pairlearn/numeric.hpp"

namespace pairlearn {

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

// All unordered pairs (i, j) with i < j over a batch, in lexicographic order.
using PairIndexList = std::vector<IndexPair>;

inline PairIndexList enumerate_pairs(std::size_t batch_size) {
    if (batch_size < 2) throw ContractError("enumerate_pairs: batch size must be >= 2");
    PairIndexList pairs;
    pairs.reserve(batch_size * (batch_size - 1) / 2);
    for (std::uint32_t i = 0; i + 1 < batch_size; ++i) {
        for (std::uint32_t j = i + 1; j < batch_size; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
}

// Pairwise targets aligned with enumerate_pairs(batch_size). Values live in
// [0, 1]; pairs with defined == 0 contribute nothing to any loss.
struct PairwiseLabelSet {
    std::size_t batch_size = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> defined;

    static PairwiseLabelSet all_defined(std::size_t batch_size, std::vector<double> v) {
        PairwiseLabelSet s;
        s.batch_size = batch_size;
        s.defined.assign(v.size(), 1);
        s.values = std::move(v);
        return s;
    }

    std::size_t pair_count() const { return values.size(); }

    std::size_t defined_count() const {
        std::size_t n = 0;
        for (auto d : defined) n += d;
        return n;
    }

    bool is_binary() const {
        for (std::size_t p = 0; p < values.size(); ++p) {
            if (defined[p] && values[p] != 0.0 && values[p] != 1.0) return false;
        }
        return true;
    }
};

// Predicted same-class probabilities, one per enumerated pair.
struct SimilarityPrediction {
    std::size_t batch_size = 0;
    std::vector<double> values;
};

// Probability that two categorical distributions select the same node: their
// inner product. Probability vectors of length K always land in [1/K, 1] for
// p == q and in [0, 1] generally.
inline double predicted_similarity(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw ContractError("predicted_similarity: distributions must have equal length");
    }
    return canonical_dot(p, q);
}

} // namespace pairlearn
