#include <doctest.h>

#include <cmath>

#include "pairlearn/losses.hpp"
#include "pairlearn/mlp.hpp"
#include "pairlearn/rng.hpp"
#include "pairlearn/similarity.hpp"

using namespace pairlearn;

namespace {

double mcl_value(const Matrix& outputs, const PairwiseLabelSet& targets) {
    ad::Tape tape(false);
    return mcl_loss(tape, tape.constant(outputs), targets)->scalar();
}

double kcl_value(const Matrix& outputs, const PairwiseLabelSet& targets, double sigma) {
    ad::Tape tape(false);
    return kcl_loss(tape, tape.constant(outputs), targets, sigma)->scalar();
}

double ce_value(const Matrix& outputs, const std::vector<int>& labels) {
    ad::Tape tape(false);
    return cross_entropy_loss(tape, tape.constant(outputs), labels)->scalar();
}

Matrix random_probs(std::size_t n, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    Matrix logits(n, k);
    for (auto& v : logits.data) v = rng.normal();
    ad::Tape tape(false);
    return tape.softmax_rows(tape.constant(logits))->matrix();
}

Matrix permute_columns(const Matrix& m, const std::vector<std::size_t>& perm) {
    Matrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = m(r, perm[c]);
    }
    return out;
}

} // namespace

TEST_CASE("enumerate_pairs: counts and ordering") {
    CHECK(enumerate_pairs(2) == PairIndexList{{0, 1}});
    CHECK(enumerate_pairs(100).size() == 4950);
    const PairIndexList p5 = enumerate_pairs(5);
    CHECK(p5.size() == 10);
    CHECK(p5.front() == IndexPair{0, 1});
    CHECK(p5.back() == IndexPair{3, 4});
    CHECK_THROWS_AS(enumerate_pairs(1), ContractError);
}

TEST_CASE("predicted_similarity: closed-form cases") {
    CHECK(predicted_similarity(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}) ==
          1.0);
    CHECK(predicted_similarity(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}) ==
          0.5);
    CHECK(predicted_similarity(std::vector<double>{0.9, 0.1}, std::vector<double>{0.8, 0.2}) ==
          doctest::Approx(0.74).epsilon(1e-14));
    CHECK_THROWS_AS(predicted_similarity(std::vector<double>{1.0},
                                         std::vector<double>{0.5, 0.5}),
                    ContractError);
}

TEST_CASE("predicted_similarity: self-similarity is at least 1/K") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Matrix p = random_probs(1, 5, seed);
        CHECK(predicted_similarity(p.row(0), p.row(0)) >= 1.0 / 5.0);
    }
    const std::vector<double> uniform(4, 0.25);
    CHECK(predicted_similarity(uniform, uniform) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("mcl_loss: perfect agreement costs at most 2e-7") {
    Matrix out(2, 3);
    out(0, 1) = 1.0;
    out(1, 1) = 1.0;
    const auto targets = PairwiseLabelSet::all_defined(2, {1.0});
    CHECK(mcl_value(out, targets) >= 0.0);
    CHECK(mcl_value(out, targets) <= 2e-7);
}

TEST_CASE("mcl_loss: scalar arithmetic cases") {
    Matrix out(2, 2);
    out(0, 0) = 0.9;
    out(0, 1) = 0.1;
    out(1, 0) = 0.8;
    out(1, 1) = 0.2;
    CHECK(mcl_value(out, PairwiseLabelSet::all_defined(2, {1.0})) ==
          doctest::Approx(-std::log(0.74)).epsilon(1e-12)); // 0.3011
    CHECK(mcl_value(out, PairwiseLabelSet::all_defined(2, {0.0})) ==
          doctest::Approx(-std::log(0.26)).epsilon(1e-12)); // 1.3471

    Matrix uniform(3, 2, 0.5);
    CHECK(mcl_value(uniform, PairwiseLabelSet::all_defined(3, {1.0, 1.0, 1.0})) ==
          doctest::Approx(-std::log(0.5)).epsilon(1e-12)); // 0.6931
}

TEST_CASE("mcl_loss: masked pairs contribute nothing") {
    const Matrix out = random_probs(4, 3, 99);
    PairwiseLabelSet full = PairwiseLabelSet::all_defined(4, {1, 0, 1, 0, 1, 0});
    PairwiseLabelSet masked = full;
    // Mask out pairs 1, 3, 5; remaining values match a 3-pair average.
    masked.defined = {1, 0, 1, 0, 1, 0};
    double manual = 0.0;
    const PairIndexList pairs = enumerate_pairs(4);
    for (std::size_t p : {std::size_t{0}, std::size_t{2}, std::size_t{4}}) {
        const auto& [i, j] = pairs[p];
        const double s_hat = predicted_similarity(out.row(i), out.row(j));
        const double c = std::min(std::max(s_hat, kProbEps), 1.0 - kProbEps);
        manual += full.values[p] == 1.0 ? std::log(c) : std::log(1.0 - c);
    }
    CHECK(mcl_value(out, masked) == doctest::Approx(-manual / 3.0).epsilon(1e-14));

    PairwiseLabelSet none = full;
    none.defined.assign(6, 0);
    CHECK_THROWS_AS(mcl_value(out, none), ContractError);
}

TEST_CASE("mcl_loss: soft targets are accepted; KCL rejects them") {
    const Matrix out = random_probs(3, 3, 4);
    const auto soft = PairwiseLabelSet::all_defined(3, {0.3, 0.7, 0.5});
    CHECK(mcl_value(out, soft) >= 0.0);
    CHECK_THROWS_AS(kcl_value(out, soft, 2.0), ContractError);
}

TEST_CASE("kcl_loss: identical distributions") {
    Matrix out(2, 3);
    out(0, 0) = out(1, 0) = 0.2;
    out(0, 1) = out(1, 1) = 0.5;
    out(0, 2) = out(1, 2) = 0.3;
    CHECK(kcl_value(out, PairwiseLabelSet::all_defined(2, {1.0}), 2.0) == 0.0);
    // Both hinges saturate at the margin.
    CHECK(kcl_value(out, PairwiseLabelSet::all_defined(2, {0.0}), 2.0) == 4.0);
}

TEST_CASE("kcl_loss: symmetric KL arithmetic case") {
    Matrix out(2, 2);
    out(0, 0) = 0.9;
    out(0, 1) = 0.1;
    out(1, 0) = 0.5;
    out(1, 1) = 0.5;
    const double kl_pq = 0.9 * std::log(0.9 / 0.5) + 0.1 * std::log(0.1 / 0.5); // 0.3681
    const double kl_qp = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1); // 0.5108
    CHECK(kcl_value(out, PairwiseLabelSet::all_defined(2, {1.0}), 2.0) ==
          doctest::Approx(kl_pq + kl_qp).epsilon(1e-12)); // 0.8789
    CHECK(kcl_value(out, PairwiseLabelSet::all_defined(2, {1.0}), 2.0) ==
          doctest::Approx(0.8789).epsilon(1e-4));
}

TEST_CASE("kcl_loss: sigma must be positive") {
    const Matrix out = random_probs(2, 2, 1);
    CHECK_THROWS_AS(kcl_value(out, PairwiseLabelSet::all_defined(2, {1.0}), 0.0), ContractError);
}

TEST_CASE("cross_entropy_loss: closed-form cases") {
    Matrix onehot(1, 4);
    onehot(0, 2) = 1.0;
    CHECK(ce_value(onehot, {2}) <= 2e-7);

    Matrix uniform(1, 10, 0.1);
    CHECK(ce_value(uniform, {7}) == doctest::Approx(std::log(10.0)).epsilon(1e-12)); // 2.3026

    Matrix p(1, 3);
    p(0, 0) = 0.7;
    p(0, 1) = 0.2;
    p(0, 2) = 0.1;
    CHECK(ce_value(p, {1}) == doctest::Approx(-std::log(0.2)).epsilon(1e-12)); // 1.6094

    CHECK_THROWS_AS(ce_value(p, {3}), ContractError);
}

TEST_CASE("losses: nonnegative on random inputs") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Matrix out = random_probs(5, 4, seed);
        Rng rng(seed * 31);
        std::vector<double> s;
        std::vector<int> labels;
        for (std::size_t p = 0; p < 10; ++p) s.push_back(rng.uniform() < 0.3 ? 1.0 : 0.0);
        for (std::size_t r = 0; r < 5; ++r) labels.push_back(static_cast<int>(rng.below(4)));
        const auto targets = PairwiseLabelSet::all_defined(5, s);
        CHECK(mcl_value(out, targets) >= 0.0);
        CHECK(kcl_value(out, targets, 2.0) >= 0.0);
        CHECK(ce_value(out, labels) >= 0.0);
    }
}

TEST_CASE("losses: bit-invariant under output-node permutations") {
    const std::vector<std::size_t> perm = {3, 1, 0, 2};
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Matrix out = random_probs(5, 4, seed);
        const Matrix permuted = permute_columns(out, perm);
        Rng rng(seed);
        std::vector<double> s;
        for (std::size_t p = 0; p < 10; ++p) s.push_back(rng.uniform() < 0.4 ? 1.0 : 0.0);
        const auto targets = PairwiseLabelSet::all_defined(5, s);
        CHECK(mcl_value(out, targets) == mcl_value(permuted, targets));
        CHECK(kcl_value(out, targets, 2.0) == kcl_value(permuted, targets, 2.0));
    }
}

TEST_CASE("mcl_loss: bit-symmetric in pair member order") {
    const Matrix out = random_probs(2, 4, 17);
    Matrix swapped(2, 4);
    for (std::size_t c = 0; c < 4; ++c) {
        swapped(0, c) = out(1, c);
        swapped(1, c) = out(0, c);
    }
    const auto s1 = PairwiseLabelSet::all_defined(2, {1.0});
    const auto s0 = PairwiseLabelSet::all_defined(2, {0.0});
    CHECK(mcl_value(out, s1) == mcl_value(swapped, s1));
    CHECK(mcl_value(out, s0) == mcl_value(swapped, s0));
}

TEST_CASE("dataset losses: match the taped losses on a full batch") {
    const Matrix out = random_probs(9, 4, 23);
    std::vector<int> labels;
    Rng rng(64);
    for (std::size_t r = 0; r < 9; ++r) labels.push_back(static_cast<int>(rng.below(4)));
    const PairwiseLabelSet targets = similarity_from_labels(labels, enumerate_pairs(9));

    CHECK(dataset_mcl_loss(out, labels) == mcl_value(out, targets));
    CHECK(dataset_kcl_loss(out, labels, 2.0) == kcl_value(out, targets, 2.0));
    CHECK(dataset_ce_loss(out, labels) == ce_value(out, labels));
}
