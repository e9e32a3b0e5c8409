#include <doctest.h>

#include <cmath>

#include "pairlearn/similarity.hpp"

using namespace pairlearn;

TEST_CASE("similarity_from_labels: basic patterns") {
    const PairIndexList pairs3 = enumerate_pairs(3);
    const PairwiseLabelSet s = similarity_from_labels({0, 0, 1}, pairs3);
    CHECK(s.values == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(s.defined_count() == 3);

    const PairwiseLabelSet all_same = similarity_from_labels({2, 2, 2}, pairs3);
    CHECK(all_same.values == std::vector<double>{1.0, 1.0, 1.0});

    const PairwiseLabelSet one_hit = similarity_from_labels({0, 1, 2, 0}, enumerate_pairs(4));
    std::size_t similar = 0;
    for (std::size_t p = 0; p < one_hit.pair_count(); ++p) similar += one_hit.values[p] == 1.0;
    CHECK(one_hit.pair_count() == 6);
    CHECK(similar == 1);
    CHECK(one_hit.values[2] == 1.0); // pair (0,3) is third in lexicographic order
}

TEST_CASE("similarity_from_labels: invariant under class relabeling") {
    const std::vector<int> labels = {0, 1, 2, 0, 1, 2, 2};
    std::vector<int> relabeled;
    const int bijection[3] = {5, 9, 1};
    for (int y : labels) relabeled.push_back(bijection[y]);
    const PairIndexList pairs = enumerate_pairs(labels.size());
    CHECK(similarity_from_labels(labels, pairs).values ==
          similarity_from_labels(relabeled, pairs).values);
}

TEST_CASE("noisy_oracle: perfect recalls are the identity") {
    const PairwiseLabelSet truth = similarity_from_labels({0, 0, 1, 1}, enumerate_pairs(4));
    NoiseSpec spec;
    spec.similar_recall = 1.0;
    spec.dissimilar_recall = 1.0;
    spec.seed = 5;
    CHECK(noisy_oracle(truth, spec).values == truth.values);
}

TEST_CASE("noisy_oracle: zero recalls complement the input") {
    const PairwiseLabelSet truth = similarity_from_labels({0, 0, 1, 1}, enumerate_pairs(4));
    NoiseSpec spec;
    spec.similar_recall = 0.0;
    spec.dissimilar_recall = 0.0;
    spec.seed = 5;
    const PairwiseLabelSet flipped = noisy_oracle(truth, spec);
    for (std::size_t p = 0; p < truth.pair_count(); ++p) {
        CHECK(flipped.values[p] == 1.0 - truth.values[p]);
    }
}

TEST_CASE("noisy_oracle: deterministic under a fixed seed") {
    const PairwiseLabelSet truth = similarity_from_labels({0, 1, 0, 1, 2}, enumerate_pairs(5));
    NoiseSpec spec;
    spec.similar_recall = 0.6;
    spec.dissimilar_recall = 0.9;
    spec.seed = 42;
    CHECK(noisy_oracle(truth, spec).values == noisy_oracle(truth, spec).values);
}

TEST_CASE("noisy_oracle: empirical recalls converge at 1e5 pairs") {
    // ~25% similar base rate from 4 balanced classes over 633 samples
    // (633*632/2 = 200028 pairs; use the first 1e5).
    std::vector<int> labels;
    for (int i = 0; i < 633; ++i) labels.push_back(i % 4);
    PairwiseLabelSet truth = similarity_from_labels(labels, enumerate_pairs(labels.size()));
    truth.values.resize(100000);
    truth.defined.resize(100000);
    truth.batch_size = 0; // direct pair-set use; alignment not needed here

    NoiseSpec spec;
    spec.similar_recall = 0.655;
    spec.dissimilar_recall = 0.992;
    spec.seed = 7;
    Rng rng(spec.seed);
    const PairwiseLabelSet noisy = apply_noise(truth, spec, rng);

    double sim_kept = 0, sim_total = 0, dis_kept = 0, dis_total = 0;
    for (std::size_t p = 0; p < truth.pair_count(); ++p) {
        if (truth.values[p] == 1.0) {
            sim_total += 1.0;
            sim_kept += noisy.values[p];
        } else {
            dis_total += 1.0;
            dis_kept += 1.0 - noisy.values[p];
        }
    }
    CHECK(sim_total > 20000);
    CHECK(std::fabs(sim_kept / sim_total - 0.655) < 0.01);
    CHECK(std::fabs(dis_kept / dis_total - 0.992) < 0.01);
}

TEST_CASE("NoiseSpec: published operating point is self-consistent") {
    NoiseSpec spec;
    spec.similar_precision = 0.812;
    spec.similar_recall = 0.655;
    spec.dissimilar_precision = 0.982;
    spec.dissimilar_recall = 0.992;
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("NoiseSpec: contradictory precisions are rejected") {
    NoiseSpec spec;
    spec.similar_precision = 0.5;
    spec.similar_recall = 0.655;
    spec.dissimilar_precision = 0.5;
    spec.dissimilar_recall = 0.992;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("NoiseSpec: out-of-range rates are rejected") {
    NoiseSpec spec;
    spec.similar_recall = 1.2;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.similar_recall = 0.5;
    spec.similar_precision = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("pseudo_similarity: threshold at one half, ties dissimilar") {
    SimilarityPrediction pred;
    pred.batch_size = 0;
    pred.values = {0.74, 0.5, 0.0, 0.5000001, 1.0};
    const PairwiseLabelSet s = pseudo_similarity(pred);
    CHECK(s.values == std::vector<double>{1.0, 0.0, 0.0, 1.0, 1.0});
    CHECK(s.defined_count() == 5);
}

TEST_CASE("pseudo_similarity: peaked self-similarity binarizes to 1") {
    // p' p >= max(p)^2 > 0.5 whenever max(p) > sqrt(0.5)
    const std::vector<double> p = {0.72, 0.18, 0.10};
    SimilarityPrediction pred;
    pred.values = {predicted_similarity(p, p)};
    CHECK(pseudo_similarity(pred).values[0] == 1.0);
}

TEST_CASE("augmentation_pairs: structure and determinism") {
    Matrix batch(3, 2);
    for (std::size_t i = 0; i < batch.size(); ++i) batch.data[i] = static_cast<double>(i);

    const AugmentedBatch zero = augmentation_pairs(batch, 0.0, 1);
    REQUIRE(zero.features.rows == 6);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(zero.features(r, c) == batch(r, c));
            CHECK(zero.features(r + 3, c) == batch(r, c));
        }
    }
    CHECK(zero.pair_labels.defined_count() == 3);
    const PairIndexList pairs = enumerate_pairs(6);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (zero.pair_labels.defined[p]) {
            CHECK(pairs[p].second == pairs[p].first + 3);
            CHECK(zero.pair_labels.values[p] == 1.0);
        }
    }

    const AugmentedBatch a = augmentation_pairs(batch, 0.5, 9);
    const AugmentedBatch b = augmentation_pairs(batch, 0.5, 9);
    CHECK(a.features.data == b.features.data);
}

TEST_CASE("combine_or: truth table and degenerate inputs") {
    auto make = [](std::vector<double> v, std::vector<std::uint8_t> d) {
        PairwiseLabelSet s;
        s.batch_size = 3;
        s.values = std::move(v);
        s.defined = std::move(d);
        return s;
    };
    const auto a = make({1.0, 0.0, 0.0}, {1, 1, 0});
    const auto b = make({0.0, 1.0, 0.0}, {1, 1, 0});
    const PairwiseLabelSet both = combine_or(a, b);
    CHECK(both.values == std::vector<double>{1.0, 1.0, 0.0});
    CHECK(both.defined == std::vector<std::uint8_t>{1, 1, 0});

    // OR with an undefined side keeps the defined value.
    const auto defined_one = make({1.0, 0.0, 0.0}, {1, 0, 0});
    const auto undefined = make({0.0, 0.0, 0.0}, {0, 0, 0});
    const PairwiseLabelSet kept = combine_or(defined_one, undefined);
    CHECK(kept.values[0] == 1.0);
    CHECK(kept.defined[0] == 1);

    const auto zeros = make({0.0, 0.0, 0.0}, {1, 1, 1});
    CHECK(combine_or(zeros, zeros).values == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("combine_or: commutative and idempotent") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        PairwiseLabelSet a, b;
        a.batch_size = b.batch_size = 4;
        for (int p = 0; p < 6; ++p) {
            a.values.push_back(rng.uniform() < 0.5 ? 1.0 : 0.0);
            a.defined.push_back(rng.uniform() < 0.7 ? 1 : 0);
            b.values.push_back(rng.uniform() < 0.5 ? 1.0 : 0.0);
            b.defined.push_back(rng.uniform() < 0.7 ? 1 : 0);
        }
        const PairwiseLabelSet ab = combine_or(a, b);
        const PairwiseLabelSet ba = combine_or(b, a);
        CHECK(ab.values == ba.values);
        CHECK(ab.defined == ba.defined);
        const PairwiseLabelSet aa = combine_or(a, a);
        for (std::size_t p = 0; p < 6; ++p) {
            if (a.defined[p]) CHECK(aa.values[p] == a.values[p]);
        }
    }
}

TEST_CASE("combine_or: mismatched pair lists are rejected") {
    PairwiseLabelSet a, b;
    a.batch_size = 3;
    a.values = {0, 0, 0};
    a.defined = {1, 1, 1};
    b.batch_size = 4;
    b.values = {0, 0, 0, 0, 0, 0};
    b.defined = {1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(combine_or(a, b), ContractError);
}

TEST_CASE("OracleSimilaritySource: noiseless source reproduces ground truth") {
    NoiseSpec spec; // default recalls 1.0
    OracleSimilaritySource source({0, 1, 0, 1, 2}, spec);
    const std::vector<std::size_t> batch = {4, 2, 0, 3};
    const PairIndexList pairs = enumerate_pairs(4);
    const PairwiseLabelSet s = source.label_pairs(batch, pairs);
    const PairwiseLabelSet expect = similarity_from_labels({2, 0, 0, 1}, pairs);
    CHECK(s.values == expect.values);
}
