#pragma once

#include <vector>

#include "pairlearn/autodiff.hpp"
#include "pairlearn/matrix.hpp"
#include "pairlearn/pairs.hpp"

namespace pairlearn {

// Probabilities are clamped away from 0 and 1 before every log.
inline constexpr double kProbEps = 1e-7;

// Predicted similarity for every enumerated pair of output rows.
SimilarityPrediction predict_similarities(const Matrix& probs, const PairIndexList& pairs);

// Binary cross-entropy on predicted pair similarity, averaged over defined
// pairs. Accepts soft targets in [0, 1]; differentiable through `outputs`.
ad::ValuePtr mcl_loss(ad::Tape& tape, const ad::ValuePtr& outputs,
                      const PairwiseLabelSet& targets);

// Symmetric-KL contrastive loss with hinge margin sigma on dissimilar pairs.
// Targets must be binary.
ad::ValuePtr kcl_loss(ad::Tape& tape, const ad::ValuePtr& outputs,
                      const PairwiseLabelSet& targets, double sigma);

// Mean negative log-probability of the true class.
ad::ValuePtr cross_entropy_loss(ad::Tape& tape, const ad::ValuePtr& outputs,
                                const std::vector<int>& labels);

// Streaming evaluation of the same losses over a full dataset, with pairwise
// targets implied by class labels (same class <=> similar). Pairs are
// enumerated lexicographically and averaged exactly as in the taped losses.
double dataset_mcl_loss(const Matrix& probs, const std::vector<int>& labels);
double dataset_kcl_loss(const Matrix& probs, const std::vector<int>& labels, double sigma);
double dataset_ce_loss(const Matrix& probs, const std::vector<int>& labels);

} // namespace pairlearn
