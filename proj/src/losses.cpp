#include "pairlearn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "pairlearn/numeric.hpp"

namespace pairlearn {

namespace {

void check_alignment(std::size_t batch_rows, const PairwiseLabelSet& targets, const char* op) {
    if (targets.batch_size != batch_rows) {
        throw ContractError(std::string(op) + ": target batch size does not match outputs");
    }
    const std::size_t expect = batch_rows * (batch_rows - 1) / 2;
    if (batch_rows < 2 || targets.pair_count() != expect ||
        targets.defined.size() != targets.pair_count()) {
        throw ContractError(std::string(op) + ": targets not aligned with enumerated pairs");
    }
}

} // namespace

SimilarityPrediction predict_similarities(const Matrix& probs, const PairIndexList& pairs) {
    SimilarityPrediction pred;
    pred.batch_size = probs.rows;
    pred.values.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (i >= probs.rows || j >= probs.rows) {
            throw ContractError("predict_similarities: pair index out of range");
        }
        pred.values.push_back(canonical_dot(probs.row(i), probs.row(j)));
    }
    return pred;
}

ad::ValuePtr mcl_loss(ad::Tape& tape, const ad::ValuePtr& outputs,
                      const PairwiseLabelSet& targets) {
    check_alignment(outputs->rows(), targets, "mcl_loss");
    const std::size_t m_defined = targets.defined_count();
    if (m_defined == 0) throw ContractError("mcl_loss: every pair is masked out");
    for (std::size_t p = 0; p < targets.pair_count(); ++p) {
        if (targets.defined[p] && (targets.values[p] < 0.0 || targets.values[p] > 1.0)) {
            throw ContractError("mcl_loss: target similarity outside [0, 1]");
        }
    }

    const PairIndexList pairs = enumerate_pairs(outputs->rows());
    auto s_hat = tape.pair_inner(outputs, pairs);
    auto s_c = tape.clamp(s_hat, kProbEps, 1.0 - kProbEps);
    auto log_s = tape.log(s_c);
    auto log_1ms = tape.log(tape.add_scalar(tape.scale(s_c, -1.0), 1.0));

    const std::size_t m = targets.pair_count();
    Matrix s(m, 1), one_minus_s(m, 1), mask(m, 1);
    for (std::size_t p = 0; p < m; ++p) {
        s.data[p] = targets.values[p];
        one_minus_s.data[p] = 1.0 - targets.values[p];
        mask.data[p] = targets.defined[p] ? 1.0 : 0.0;
    }
    auto term = tape.add(tape.mul(tape.constant(std::move(s)), log_s),
                         tape.mul(tape.constant(std::move(one_minus_s)), log_1ms));
    auto masked = tape.mul(tape.constant(std::move(mask)), term);
    return tape.scale(tape.divide_by(tape.sum(masked), static_cast<double>(m_defined)), -1.0);
}

ad::ValuePtr kcl_loss(ad::Tape& tape, const ad::ValuePtr& outputs,
                      const PairwiseLabelSet& targets, double sigma) {
    check_alignment(outputs->rows(), targets, "kcl_loss");
    if (!(sigma > 0.0)) throw ContractError("kcl_loss: sigma must be positive");
    if (!targets.is_binary()) {
        throw ContractError("kcl_loss: hinge form requires binary targets");
    }
    const std::size_t m_defined = targets.defined_count();
    if (m_defined == 0) throw ContractError("kcl_loss: every pair is masked out");

    const PairIndexList pairs = enumerate_pairs(outputs->rows());
    std::vector<std::size_t> left, right;
    left.reserve(pairs.size());
    right.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        left.push_back(i);
        right.push_back(j);
    }
    auto a = tape.gather_rows(outputs, std::move(left));
    auto b = tape.gather_rows(outputs, std::move(right));
    auto log_a = tape.log(tape.clamp_min(a, kProbEps));
    auto log_b = tape.log(tape.clamp_min(b, kProbEps));
    auto kl_ab = tape.row_sum(tape.mul(a, tape.sub(log_a, log_b)));
    auto kl_ba = tape.row_sum(tape.mul(b, tape.sub(log_b, log_a)));
    auto sym = tape.add(kl_ab, kl_ba);
    auto hinge_ab = tape.relu(tape.add_scalar(tape.scale(kl_ab, -1.0), sigma));
    auto hinge_ba = tape.relu(tape.add_scalar(tape.scale(kl_ba, -1.0), sigma));
    auto hinge_sum = tape.add(hinge_ab, hinge_ba);

    const std::size_t m = targets.pair_count();
    Matrix s(m, 1), one_minus_s(m, 1), mask(m, 1);
    for (std::size_t p = 0; p < m; ++p) {
        s.data[p] = targets.values[p];
        one_minus_s.data[p] = 1.0 - targets.values[p];
        mask.data[p] = targets.defined[p] ? 1.0 : 0.0;
    }
    auto per_pair = tape.add(tape.mul(tape.constant(std::move(s)), sym),
                             tape.mul(tape.constant(std::move(one_minus_s)), hinge_sum));
    auto masked = tape.mul(tape.constant(std::move(mask)), per_pair);
    return tape.divide_by(tape.sum(masked), static_cast<double>(m_defined));
}

ad::ValuePtr cross_entropy_loss(ad::Tape& tape, const ad::ValuePtr& outputs,
                                const std::vector<int>& labels) {
    if (labels.size() != outputs->rows()) {
        throw ContractError("cross_entropy_loss: one label per output row required");
    }
    std::vector<std::size_t> cols;
    cols.reserve(labels.size());
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= outputs->cols()) {
            throw ContractError("cross_entropy_loss: label outside {0..K-1}");
        }
        cols.push_back(static_cast<std::size_t>(y));
    }
    auto picked = tape.pick_per_row(outputs, std::move(cols));
    auto log_p = tape.log(tape.clamp(picked, kProbEps, 1.0 - kProbEps));
    return tape.scale(tape.divide_by(tape.sum(log_p), static_cast<double>(labels.size())), -1.0);
}

double dataset_mcl_loss(const Matrix& probs, const std::vector<int>& labels) {
    const std::size_t n = probs.rows;
    if (labels.size() != n) throw ContractError("dataset_mcl_loss: label count mismatch");
    if (n < 2) throw ContractError("dataset_mcl_loss: need at least two samples");
    double acc = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dot = canonical_dot(probs.row(i), probs.row(j));
            const double c = std::min(std::max(dot, kProbEps), 1.0 - kProbEps);
            acc += labels[i] == labels[j] ? std::log(c) : std::log(1.0 - c);
            ++m;
        }
    }
    return -(acc / static_cast<double>(m));
}

double dataset_kcl_loss(const Matrix& probs, const std::vector<int>& labels, double sigma) {
    const std::size_t n = probs.rows;
    const std::size_t k = probs.cols;
    if (labels.size() != n) throw ContractError("dataset_kcl_loss: label count mismatch");
    if (n < 2) throw ContractError("dataset_kcl_loss: need at least two samples");
    if (!(sigma > 0.0)) throw ContractError("dataset_kcl_loss: sigma must be positive");

    Matrix log_p(n, k);
    for (std::size_t i = 0; i < n * k; ++i) {
        const double v = probs.data[i] > kProbEps ? probs.data[i] : kProbEps;
        log_p.data[i] = std::log(v);
    }

    std::vector<double> terms(k);
    double acc = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t c = 0; c < k; ++c) {
                terms[c] = probs(i, c) * (log_p(i, c) - log_p(j, c));
            }
            const double kl_ij = canonical_sum(terms);
            for (std::size_t c = 0; c < k; ++c) {
                terms[c] = probs(j, c) * (log_p(j, c) - log_p(i, c));
            }
            const double kl_ji = canonical_sum(terms);
            if (labels[i] == labels[j]) {
                acc += kl_ij + kl_ji;
            } else {
                const double h_ij = sigma + (kl_ij * -1.0);
                const double h_ji = sigma + (kl_ji * -1.0);
                acc += (h_ij > 0.0 ? h_ij : 0.0) + (h_ji > 0.0 ? h_ji : 0.0);
            }
            ++m;
        }
    }
    return acc / static_cast<double>(m);
}

double dataset_ce_loss(const Matrix& probs, const std::vector<int>& labels) {
    const std::size_t n = probs.rows;
    if (labels.size() != n) throw ContractError("dataset_ce_loss: label count mismatch");
    if (n == 0) throw ContractError("dataset_ce_loss: empty batch");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= probs.cols) {
            throw ContractError("dataset_ce_loss: label outside {0..K-1}");
        }
        const double p = probs(i, static_cast<std::size_t>(labels[i]));
        const double c = std::min(std::max(p, kProbEps), 1.0 - kProbEps);
        acc += std::log(c);
    }
    return -(acc / static_cast<double>(n));
}

} // namespace pairlearn
