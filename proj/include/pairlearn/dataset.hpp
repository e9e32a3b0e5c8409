#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairlearn/matrix.hpp"

namespace pairlearn {

struct LabeledDataset {
    Matrix features;         // N x d
    std::vector<int> labels; // in {0..num_classes-1}
    int num_classes = 0;

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }
};

// Every class in {0..C-1} must own at least one sample.
void validate_labeled(const LabeledDataset& ds);

// Feature matrix whose labels, if any, are reserved for evaluation. Training
// code receives only features() and never sees the hidden labels.
class UnlabeledDataset {
public:
    explicit UnlabeledDataset(Matrix features) : features_(std::move(features)) {}
    UnlabeledDataset(Matrix features, std::vector<int> hidden_labels, int hidden_classes)
        : features_(std::move(features)),
          hidden_labels_(std::move(hidden_labels)),
          hidden_classes_(hidden_classes) {}

    static UnlabeledDataset hide_labels(LabeledDataset ds) {
        return UnlabeledDataset(std::move(ds.features), std::move(ds.labels), ds.num_classes);
    }

    const Matrix& features() const { return features_; }
    std::size_t size() const { return features_.rows; }
    bool has_hidden_labels() const { return hidden_labels_.has_value(); }
    const std::vector<int>& hidden_labels_for_eval() const;
    int hidden_class_count() const { return hidden_classes_; }

private:
    Matrix features_;
    std::optional<std::vector<int>> hidden_labels_;
    int hidden_classes_ = 0;
};

// Gaussian class blobs: centers evenly spaced on a circle of radius
// `separation` (seeded phase) in the first two feature coordinates, samples
// jittered with stddev `spread`, rows shuffled. d == 1 supports C <= 2 only.
LabeledDataset generate_blobs(int num_classes, int per_class, int dim, double separation,
                              double spread, std::uint64_t seed);

// CSV rows are features followed by an optional integer label column; no
// header. Numbers round-trip exactly (17 significant digits on write).
LabeledDataset load_labeled_csv(const std::string& path);
UnlabeledDataset load_unlabeled_csv(const std::string& path);
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);
void save_features_csv(const Matrix& features, const std::string& path);

// Additive seeded Gaussian jitter.
Matrix perturb(const Matrix& features, double scale, std::uint64_t seed);

// First n rows / remaining rows, preserving the declared class count.
std::pair<LabeledDataset, LabeledDataset> split_head(const LabeledDataset& ds, std::size_t n);

} // namespace pairlearn
