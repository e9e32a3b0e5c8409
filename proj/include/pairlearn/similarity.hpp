#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pairlearn/matrix.hpp"
#include "pairlearn/pairs.hpp"
#include "pairlearn/rng.hpp"

namespace pairlearn {

// Error rates of a simulated pairwise-similarity oracle. The two recalls drive
// the label flips directly; the precisions, when given, are targets that must
// be achievable together with the recalls at some similar-pair base rate
// (checked by validate) because precision emerges from the class balance.
struct NoiseSpec {
    double similar_recall = 1.0;    // P(reported similar | truly similar)
    double dissimilar_recall = 1.0; // P(reported dissimilar | truly dissimilar)
    std::optional<double> similar_precision;
    std::optional<double> dissimilar_precision;
    std::uint64_t seed = 0;

    void validate() const;
};

// Ground-truth pairwise targets: similar iff the class labels match.
PairwiseLabelSet similarity_from_labels(const std::vector<int>& labels,
                                        const PairIndexList& pairs);

// Flips binary targets with the spec's recall rates using the given stream.
PairwiseLabelSet apply_noise(const PairwiseLabelSet& true_s, const NoiseSpec& spec, Rng& rng);

// Pure form: a fresh stream seeded from spec.seed.
PairwiseLabelSet noisy_oracle(const PairwiseLabelSet& true_s, const NoiseSpec& spec);

// Binarizes predicted similarities at 0.5; a tie maps to dissimilar. The
// result is plain data, so no gradient can flow through it.
PairwiseLabelSet pseudo_similarity(const SimilarityPrediction& predictions);

struct AugmentedBatch {
    Matrix features;             // originals followed by their jittered copies
    PairwiseLabelSet pair_labels; // defined only on (i, n+i), all similar
};

// Duplicates each sample with additive Gaussian jitter and marks each
// (original, copy) pair as similar; every other pair stays undefined.
AugmentedBatch augmentation_pairs(const Matrix& batch, double perturbation_scale,
                                  std::uint64_t seed);

// Per-pair logical OR over two binary label sets on the same pair list; a pair
// is defined if either input defines it and undefined values count as 0.
PairwiseLabelSet combine_or(const PairwiseLabelSet& a, const PairwiseLabelSet& b);

// What a training loop is allowed to see of a similarity producer.
class SimilaritySource {
public:
    virtual ~SimilaritySource() = default;
    virtual PairwiseLabelSet label_pairs(std::span<const std::size_t> batch_indices,
                                         const PairIndexList& pairs) = 0;
};

// Stands in for a transferred similarity-prediction model: owns the hidden
// labels and reports ground truth corrupted at the spec's rates.
class OracleSimilaritySource final : public SimilaritySource {
public:
    OracleSimilaritySource(std::vector<int> hidden_labels, NoiseSpec spec)
        : labels_(std::move(hidden_labels)), spec_(spec), rng_(spec.seed) {
        spec_.validate();
    }

    PairwiseLabelSet label_pairs(std::span<const std::size_t> batch_indices,
                                 const PairIndexList& pairs) override;

private:
    std::vector<int> labels_;
    NoiseSpec spec_;
    Rng rng_;
};

} // namespace pairlearn
