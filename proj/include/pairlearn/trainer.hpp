#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pairlearn/csv_io.hpp"
#include "pairlearn/dataset.hpp"
#include "pairlearn/losses.hpp"
#include "pairlearn/mlp.hpp"
#include "pairlearn/optimizer.hpp"
#include "pairlearn/similarity.hpp"

namespace pairlearn {

enum class Objective { CrossEntropy, Mcl, Kcl };

const char* objective_name(Objective o);

struct TrainConfig {
    Objective objective = Objective::Mcl;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t batch_size = 32;
    int epochs = 60;
    std::vector<int> decay_epochs = {40};
    double decay_factor = 0.1;
    std::uint64_t seed = 0;
    double sigma = 2.0; // KCL margin

    void validate() const;
    OptimizerSettings optimizer_settings() const;
    // Learning rate in force during 1-based epoch e.
    double learning_rate_at(int epoch) const;
};

// Called once per epoch with the current model; returns (accuracy, nmi) for
// the history row, or nothing when labels are unavailable.
using EpochEval =
    std::function<std::optional<std::pair<double, double>>(int epoch, const Mlp& model)>;

struct TrainResult {
    Mlp model;
    MetricsReport history;
};

// Supervised training: pairwise targets derived from class labels for MCL and
// KCL, plain class labels for cross-entropy.
TrainResult train_supervised_pairwise(Mlp model, const LabeledDataset& data,
                                      const TrainConfig& cfg, const EpochEval& eval = {});

// Transfer training: targets come from the similarity source per minibatch;
// class labels are never touched. Cross-entropy is not available here.
TrainResult train_unsupervised_transfer(Mlp model, const Matrix& features,
                                        SimilaritySource& source, const TrainConfig& cfg,
                                        const EpochEval& eval = {});

struct SslWeights {
    double alpha = 0.0; // supervised term
    double beta = 0.0;  // regularization term
};

// Natural-statistics weighting: alpha = n_labeled / (n_total_reg + n_labeled),
// beta = n_total_reg / (n_total_reg + n_labeled).
SslWeights ssl_weights(std::size_t n_labeled, std::size_t n_total_reg);

struct SemiOptions {
    bool augment = true;
    double augmentation_scale = 0.1;
    // Pre-train on the labeled subset with cross-entropy before the composite
    // phase.
    bool warm_start = true;
};

// Composite semi-supervised training: alpha * CE on labeled members plus
// beta * MCL over all pairs, where pair targets use ground truth when both
// members are labeled and otherwise the OR of binarized predicted similarity
// (recomputed each minibatch, gradient-detached) and augmentation pairs.
TrainResult train_semi_supervised(Mlp model, const LabeledDataset& labeled,
                                  const UnlabeledDataset& unlabeled, const TrainConfig& cfg,
                                  const SemiOptions& options, const EpochEval& eval = {});

} // namespace pairlearn
