#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairlearn/evaluation.hpp"
#include "pairlearn/rng.hpp"

using namespace pairlearn;

namespace {

// Exhaustive assignment oracle: tries every injective map of the smaller side
// into the larger one, in lexicographic order, keeping the first minimum.
struct BruteForceResult {
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> node_to_class;
};

void brute_force_recurse(const Matrix& cost, std::size_t node, std::vector<int>& current,
                         std::vector<char>& used, std::size_t matched, std::size_t target,
                         BruteForceResult& out) {
    const std::size_t k = cost.rows, c = cost.cols;
    if (node == k) {
        if (matched != target) return;
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (current[i] >= 0) total += cost(i, static_cast<std::size_t>(current[i]));
        }
        if (total < out.best_cost) {
            out.best_cost = total;
            out.node_to_class = current;
        }
        return;
    }
    // Classes in ascending order, then "unmatched" last, mirrors the
    // documented lexicographic preference.
    for (std::size_t cls = 0; cls < c; ++cls) {
        if (used[cls]) continue;
        used[cls] = 1;
        current[node] = static_cast<int>(cls);
        brute_force_recurse(cost, node + 1, current, used, matched + 1, target, out);
        used[cls] = 0;
    }
    current[node] = -1;
    if (k - node - 1 + matched >= target) {
        brute_force_recurse(cost, node + 1, current, used, matched, target, out);
    }
}

BruteForceResult brute_force_assignment(const Matrix& cost) {
    BruteForceResult out;
    std::vector<int> current(cost.rows, -1);
    std::vector<char> used(cost.cols, 0);
    brute_force_recurse(cost, 0, current, used, 0, std::min(cost.rows, cost.cols), out);
    return out;
}

Matrix random_cost(std::size_t k, std::size_t c, Rng& rng) {
    Matrix m(k, c);
    for (auto& v : m.data) v = rng.uniform(-5.0, 5.0);
    return m;
}

ContingencyTable table_from(std::initializer_list<std::initializer_list<long long>> rows) {
    const std::size_t k = rows.size();
    const std::size_t c = rows.begin()->size();
    ContingencyTable t(k, c);
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t col = 0;
        for (long long v : row) {
            t.at(r, col) = v;
            t.total += v;
            ++col;
        }
        ++r;
    }
    return t;
}

// Definition-level NMI oracle straight from the entropy formulas.
double nmi_oracle(const ContingencyTable& t) {
    const double n = static_cast<double>(t.total);
    std::vector<double> row(t.nodes, 0.0), col(t.classes, 0.0);
    for (std::size_t k = 0; k < t.nodes; ++k) {
        for (std::size_t c = 0; c < t.classes; ++c) {
            row[k] += static_cast<double>(t.at(k, c));
            col[c] += static_cast<double>(t.at(k, c));
        }
    }
    double mi = 0.0, hu = 0.0, hv = 0.0;
    for (std::size_t k = 0; k < t.nodes; ++k) {
        for (std::size_t c = 0; c < t.classes; ++c) {
            const double nij = static_cast<double>(t.at(k, c));
            if (nij > 0.0) mi += (nij / n) * std::log((nij * n) / (row[k] * col[c]));
        }
    }
    for (double r : row) {
        if (r > 0.0) hu -= (r / n) * std::log(r / n);
    }
    for (double c : col) {
        if (c > 0.0) hv -= (c / n) * std::log(c / n);
    }
    if (hu == 0.0 && hv == 0.0) return 1.0;
    if (hu == 0.0 || hv == 0.0) return 0.0;
    return mi / std::sqrt(hu * hv);
}

} // namespace

TEST_CASE("hungarian: diagonal-zero matrix picks the identity") {
    Matrix cost(3, 3, 1.0);
    for (std::size_t i = 0; i < 3; ++i) cost(i, i) = 0.0;
    const Assignment a = hungarian(cost);
    CHECK(a.node_to_class == std::vector<int>{0, 1, 2});
    CHECK(a.total_cost == 0.0);
}

TEST_CASE("hungarian: unique 2x2 optimum") {
    Matrix cost(2, 2);
    cost(0, 0) = 1.0;
    cost(0, 1) = 2.0;
    cost(1, 0) = 2.0;
    cost(1, 1) = 1.0;
    const Assignment a = hungarian(cost);
    CHECK(a.node_to_class == std::vector<int>{0, 1});
    CHECK(a.total_cost == 2.0);
}

TEST_CASE("hungarian: equals the exhaustive oracle on random rectangles") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = 2 + rng.below(5); // up to 6
        const std::size_t c = 2 + rng.below(5);
        const Matrix cost = random_cost(k, c, rng);
        const Assignment got = hungarian(cost);
        const BruteForceResult expect = brute_force_assignment(cost);
        CHECK(got.total_cost == expect.best_cost);
        CHECK(got.matches == std::min(k, c));
    }
}

TEST_CASE("hungarian: 6x4 matches brute force over all injective maps") {
    Rng rng(99);
    const Matrix cost = random_cost(6, 4, rng);
    const Assignment got = hungarian(cost);
    const BruteForceResult expect = brute_force_assignment(cost);
    CHECK(got.total_cost == expect.best_cost);
}

TEST_CASE("hungarian: ties resolve to the lexicographically smallest map") {
    // All-equal costs: every complete matching is optimal.
    Matrix flat(3, 3, 1.0);
    CHECK(hungarian(flat).node_to_class == std::vector<int>{0, 1, 2});

    Matrix wide(2, 4, 0.0);
    CHECK(hungarian(wide).node_to_class == std::vector<int>{0, 1});

    // More nodes than classes: later nodes go unmatched on equal costs.
    Matrix tall(4, 2, 3.0);
    CHECK(hungarian(tall).node_to_class == std::vector<int>{0, 1, -1, -1});
}

TEST_CASE("hungarian: empty and non-finite inputs are rejected") {
    CHECK_THROWS_AS(hungarian(Matrix(0, 0)), ContractError);
    Matrix bad(1, 2);
    bad(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(hungarian(bad), DomainError);
}

TEST_CASE("clustering_accuracy: worked cases") {
    CHECK(clustering_accuracy(table_from({{10, 0}, {0, 10}})) == 1.0);
    // Unmatched third node costs its 5 samples.
    CHECK(clustering_accuracy(table_from({{10, 0}, {0, 10}, {5, 0}})) ==
          doctest::Approx(0.8).epsilon(1e-15));
    // Uniform table: any assignment matches 1/C of the mass.
    CHECK(clustering_accuracy(table_from({{3, 3, 3}, {3, 3, 3}, {3, 3, 3}})) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("clustering_accuracy: invariant under node and class permutations") {
    Rng rng(555);
    ContingencyTable t(5, 3);
    for (auto& v : t.counts) {
        v = static_cast<long long>(rng.below(20));
        t.total += v;
    }
    const double base = clustering_accuracy(t);

    ContingencyTable perm(5, 3);
    const std::size_t node_perm[5] = {4, 2, 0, 1, 3};
    const std::size_t class_perm[3] = {2, 0, 1};
    for (std::size_t k = 0; k < 5; ++k) {
        for (std::size_t c = 0; c < 3; ++c) perm.at(k, c) = t.at(node_perm[k], class_perm[c]);
    }
    perm.total = t.total;
    CHECK(clustering_accuracy(perm) == base);
    CHECK(nmi(perm) == nmi(t));
}

TEST_CASE("nmi: identical, independent, and worked cases") {
    CHECK(nmi(table_from({{7, 0}, {0, 5}})) == 1.0);
    // Product table => statistically independent partitions.
    CHECK(std::fabs(nmi(table_from({{2, 4}, {4, 8}}))) < 1e-12);
    const ContingencyTable t = table_from({{5, 1}, {1, 5}});
    CHECK(std::fabs(nmi(t) - nmi_oracle(t)) < 1e-10);
}

TEST_CASE("nmi: degenerate single-cluster conventions") {
    CHECK(nmi(table_from({{9}})) == 1.0);               // both single-cluster, identical
    CHECK(nmi(table_from({{4, 5}})) == 0.0);            // one side single-cluster
    CHECK(nmi(table_from({{4}, {5}})) == 0.0);          // other side single-cluster
}

TEST_CASE("nmi: accuracy one implies nmi one on a nondegenerate table") {
    const ContingencyTable t = table_from({{8, 0, 0}, {0, 3, 0}, {0, 0, 9}});
    CHECK(clustering_accuracy(t) == 1.0);
    CHECK(nmi(t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nmi: matches the oracle on random tables") {
    Rng rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        ContingencyTable t(2 + rng.below(5), 2 + rng.below(4));
        t.counts.assign(t.nodes * t.classes, 0);
        for (auto& v : t.counts) v = static_cast<long long>(rng.below(30));
        t.total = std::accumulate(t.counts.begin(), t.counts.end(), 0LL);
        if (t.total == 0) continue;
        CHECK(std::fabs(nmi(t) - nmi_oracle(t)) < 1e-10);
    }
}

TEST_CASE("ndc: anchor case and direct evaluation") {
    // 1000 samples over K=100 puts the dominance threshold at 10.
    std::vector<long long> sizes(100, 0);
    for (int i = 0; i < 40; ++i) sizes[static_cast<std::size_t>(i)] = 25; // 40 * 25 = 1000
    CHECK(ndc(sizes, 1000, 100) == 40);
    sizes.assign(100, 10); // exactly at the threshold
    CHECK(ndc(sizes, 1000, 100) == 100);

    CHECK(ndc({10, 10, 0, 0}, 20, 4) == 2);
    CHECK(ndc({5, 5, 5, 5}, 20, 4) == 4); // all equal to the mean
}

TEST_CASE("ndc: invariant under cluster reordering") {
    const std::vector<long long> sizes = {17, 0, 3, 25, 5};
    std::vector<long long> shuffled = {25, 5, 17, 3, 0};
    CHECK(ndc(sizes, 50, 5) == ndc(shuffled, 50, 5));
}

TEST_CASE("adif: worked cases") {
    CHECK(adif({20, 26}, {20, 26}) == 0.0);
    CHECK(adif({22}, {20}) == 2.0);
    CHECK(adif({26, 25}, {26, 26}) == 0.5);
    CHECK_THROWS_AS(adif({1, 2}, {1}), ContractError);
}

TEST_CASE("evaluate_predictions: argmax mapping on a tiny case") {
    Matrix probs(4, 3);
    probs(0, 0) = 0.8; probs(0, 1) = 0.1; probs(0, 2) = 0.1;
    probs(1, 0) = 0.1; probs(1, 1) = 0.8; probs(1, 2) = 0.1;
    probs(2, 0) = 0.1; probs(2, 1) = 0.8; probs(2, 2) = 0.1;
    probs(3, 0) = 0.2; probs(3, 1) = 0.1; probs(3, 2) = 0.7;
    const EvalResult r = evaluate_predictions(probs, {0, 1, 1, 0}, 2);
    CHECK(r.accuracy == doctest::Approx(0.75));
    CHECK(r.cluster_sizes == std::vector<long long>{1, 2, 1});
    CHECK(r.ndc_value == 1); // threshold 4/3; only the size-2 node dominates
}
