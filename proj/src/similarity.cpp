#include "pairlearn/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "pairlearn/error.hpp"

namespace pairlearn {

namespace {

constexpr double kPrecisionTol = 0.02;

double implied_similar_precision(double base_rate, double r_s, double r_d) {
    const double tp = base_rate * r_s;
    const double fp = (1.0 - base_rate) * (1.0 - r_d);
    return tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
}

double implied_dissimilar_precision(double base_rate, double r_s, double r_d) {
    const double tn = (1.0 - base_rate) * r_d;
    const double fn = base_rate * (1.0 - r_s);
    return tn + fn > 0.0 ? tn / (tn + fn) : 1.0;
}

} // namespace

void NoiseSpec::validate() const {
    if (similar_recall < 0.0 || similar_recall > 1.0 || dissimilar_recall < 0.0 ||
        dissimilar_recall > 1.0) {
        throw ConfigError("NoiseSpec: recalls must lie in [0, 1]");
    }
    for (const auto& p : {similar_precision, dissimilar_precision}) {
        if (p && (*p <= 0.0 || *p > 1.0)) {
            throw ConfigError("NoiseSpec: precisions must lie in (0, 1]");
        }
    }
    if (similar_precision && dissimilar_precision) {
        // Both precisions pin the base rate; scan for one that realizes the
        // pair of targets together with the given recalls.
        double best = 1e9;
        for (int i = 1; i < 2000; ++i) {
            const double pi = static_cast<double>(i) / 2000.0;
            const double err_s =
                std::fabs(implied_similar_precision(pi, similar_recall, dissimilar_recall) -
                          *similar_precision);
            const double err_d =
                std::fabs(implied_dissimilar_precision(pi, similar_recall, dissimilar_recall) -
                          *dissimilar_precision);
            best = std::min(best, std::max(err_s, err_d));
        }
        if (best > kPrecisionTol) {
            throw ConfigError(
                "NoiseSpec: no similar-pair base rate realizes the requested precisions "
                "together with the requested recalls");
        }
    }
}

PairwiseLabelSet similarity_from_labels(const std::vector<int>& labels,
                                        const PairIndexList& pairs) {
    PairwiseLabelSet out;
    out.batch_size = labels.size();
    out.values.reserve(pairs.size());
    out.defined.assign(pairs.size(), 1);
    for (const auto& [i, j] : pairs) {
        if (i >= labels.size() || j >= labels.size()) {
            throw ContractError("similarity_from_labels: pair index outside label range");
        }
        out.values.push_back(labels[i] == labels[j] ? 1.0 : 0.0);
    }
    return out;
}

PairwiseLabelSet apply_noise(const PairwiseLabelSet& true_s, const NoiseSpec& spec, Rng& rng) {
    spec.validate();
    if (!true_s.is_binary()) throw ContractError("apply_noise: targets must be binary");

    if (spec.similar_precision || spec.dissimilar_precision) {
        // Feasibility at this batch's base rate: the flips available from one
        // side must be able to supply the other side's error budget.
        double n_s = 0.0, n_d = 0.0;
        for (std::size_t p = 0; p < true_s.pair_count(); ++p) {
            if (!true_s.defined[p]) continue;
            (true_s.values[p] == 1.0 ? n_s : n_d) += 1.0;
        }
        if (spec.similar_precision) {
            const double reported_tp = n_s * spec.similar_recall;
            const double required_fp = reported_tp * (1.0 - *spec.similar_precision) /
                                       *spec.similar_precision;
            if (required_fp > n_d) {
                throw ConfigError("apply_noise: similar-pair precision unreachable at this "
                                  "batch's base rate");
            }
        }
        if (spec.dissimilar_precision) {
            const double reported_tn = n_d * spec.dissimilar_recall;
            const double required_fn = reported_tn * (1.0 - *spec.dissimilar_precision) /
                                       *spec.dissimilar_precision;
            if (required_fn > n_s) {
                throw ConfigError("apply_noise: dissimilar-pair precision unreachable at this "
                                  "batch's base rate");
            }
        }
    }

    PairwiseLabelSet out = true_s;
    for (std::size_t p = 0; p < out.pair_count(); ++p) {
        if (!out.defined[p]) continue;
        if (true_s.values[p] == 1.0) {
            out.values[p] = rng.uniform() < spec.similar_recall ? 1.0 : 0.0;
        } else {
            out.values[p] = rng.uniform() < spec.dissimilar_recall ? 0.0 : 1.0;
        }
    }
    return out;
}

PairwiseLabelSet noisy_oracle(const PairwiseLabelSet& true_s, const NoiseSpec& spec) {
    Rng rng(spec.seed);
    return apply_noise(true_s, spec, rng);
}

PairwiseLabelSet pseudo_similarity(const SimilarityPrediction& predictions) {
    PairwiseLabelSet out;
    out.batch_size = predictions.batch_size;
    out.values.reserve(predictions.values.size());
    out.defined.assign(predictions.values.size(), 1);
    for (double v : predictions.values) {
        if (v < 0.0 || v > 1.0) {
            throw ContractError("pseudo_similarity: prediction outside [0, 1]");
        }
        out.values.push_back(v > 0.5 ? 1.0 : 0.0);
    }
    return out;
}

AugmentedBatch augmentation_pairs(const Matrix& batch, double perturbation_scale,
                                  std::uint64_t seed) {
    if (perturbation_scale < 0.0) {
        throw ContractError("augmentation_pairs: perturbation scale must be >= 0");
    }
    if (batch.rows == 0) throw ContractError("augmentation_pairs: empty batch");
    const std::size_t n = batch.rows, d = batch.cols;
    AugmentedBatch out;
    out.features = Matrix(2 * n, d);
    Rng rng(seed);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) out.features(r, c) = batch(r, c);
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out.features(n + r, c) = batch(r, c) + perturbation_scale * rng.normal();
        }
    }
    const PairIndexList pairs = enumerate_pairs(2 * n);
    out.pair_labels.batch_size = 2 * n;
    out.pair_labels.values.assign(pairs.size(), 0.0);
    out.pair_labels.defined.assign(pairs.size(), 0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& [i, j] = pairs[p];
        if (j == i + n) {
            out.pair_labels.values[p] = 1.0;
            out.pair_labels.defined[p] = 1;
        }
    }
    return out;
}

PairwiseLabelSet combine_or(const PairwiseLabelSet& a, const PairwiseLabelSet& b) {
    if (a.batch_size != b.batch_size || a.pair_count() != b.pair_count()) {
        throw ContractError("combine_or: label sets cover different pair lists");
    }
    if (!a.is_binary() || !b.is_binary()) {
        throw ContractError("combine_or: inputs must be binary");
    }
    PairwiseLabelSet out;
    out.batch_size = a.batch_size;
    out.values.resize(a.pair_count());
    out.defined.resize(a.pair_count());
    for (std::size_t p = 0; p < a.pair_count(); ++p) {
        const bool av = a.defined[p] && a.values[p] == 1.0;
        const bool bv = b.defined[p] && b.values[p] == 1.0;
        out.defined[p] = (a.defined[p] || b.defined[p]) ? 1 : 0;
        out.values[p] = (av || bv) ? 1.0 : 0.0;
    }
    return out;
}

PairwiseLabelSet OracleSimilaritySource::label_pairs(std::span<const std::size_t> batch_indices,
                                                     const PairIndexList& pairs) {
    std::vector<int> batch_labels;
    batch_labels.reserve(batch_indices.size());
    for (std::size_t idx : batch_indices) {
        if (idx >= labels_.size()) {
            throw ContractError("OracleSimilaritySource: batch index out of range");
        }
        batch_labels.push_back(labels_[idx]);
    }
    return apply_noise(similarity_from_labels(batch_labels, pairs), spec_, rng_);
}

} // namespace pairlearn
