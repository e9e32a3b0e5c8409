#pragma once

#include <cstddef>
#include <vector>

#include "pairlearn/matrix.hpp"

namespace pairlearn {

// Counts n_kc of samples landing on output node k whose true class is c.
struct ContingencyTable {
    std::size_t nodes = 0;   // K
    std::size_t classes = 0; // C
    std::vector<long long> counts;
    long long total = 0;

    ContingencyTable() = default;
    ContingencyTable(std::size_t k, std::size_t c)
        : nodes(k), classes(c), counts(k * c, 0) {}

    static ContingencyTable from_assignments(const std::vector<int>& node_of_sample,
                                             const std::vector<int>& class_of_sample,
                                             std::size_t num_nodes, std::size_t num_classes);

    long long at(std::size_t k, std::size_t c) const { return counts[k * classes + c]; }
    long long& at(std::size_t k, std::size_t c) { return counts[k * classes + c]; }
    std::vector<long long> node_totals() const;
    std::vector<long long> class_totals() const;
};

// Partial injective map from output nodes to classes; -1 marks an unmatched
// node. Exactly min(K, C) nodes are matched.
struct Assignment {
    std::vector<int> node_to_class;
    double total_cost = 0.0;
    std::size_t matches = 0;
};

// Globally optimal min-cost assignment on a rectangular cost matrix, with ties
// broken toward the lexicographically smallest node_to_class vector (unmatched
// ordered after every class). Tie detection compares totals exactly.
Assignment hungarian(const Matrix& cost);

// Fraction of samples whose node maps to their class under the optimal
// assignment on cost -n_kc; samples on unmatched nodes count as errors.
double clustering_accuracy(const ContingencyTable& table);

// I(U;V) / sqrt(H(U) H(V)) with natural logs and 0 log 0 = 0. When both
// partitions are single-cluster the value is 1; when exactly one marginal
// entropy vanishes the partitions differ and the value is 0.
double nmi(const ContingencyTable& table);

// Number of dominant clusters: those with size >= N/K.
int ndc(const std::vector<long long>& cluster_sizes, long long total, std::size_t num_nodes);

// Mean absolute difference between estimated and true class counts.
double adif(const std::vector<int>& estimates, const std::vector<int>& truths);

// Metrics of a prediction batch against true labels: argmax node per sample,
// Hungarian-mapped accuracy, NMI, and the dominant-cluster count.
struct EvalResult {
    double accuracy = 0.0;
    double nmi_value = 0.0;
    int ndc_value = 0;
    std::vector<long long> cluster_sizes;
};

EvalResult evaluate_predictions(const Matrix& probs, const std::vector<int>& labels,
                                std::size_t num_classes);

} // namespace pairlearn
