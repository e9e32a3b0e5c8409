#include <doctest.h>

#include <cmath>

#include "pairlearn/autodiff.hpp"
#include "pairlearn/losses.hpp"
#include "pairlearn/mlp.hpp"
#include "pairlearn/rng.hpp"
#include "pairlearn/similarity.hpp"

using namespace pairlearn;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    Matrix m(r, c);
    for (auto& v : m.data) v = rng.normal();
    return m;
}

// Scalar field of an MLP loss for gradient checking.
ad::ScalarField taped_loss_field(
    const MlpSpec& spec, const Matrix& batch,
    std::function<ad::ValuePtr(ad::Tape&, const ad::ValuePtr&)> build) {
    ad::ScalarField f;
    f.value = [=](const ParameterVector& at) {
        ad::Tape tape(/*grad_enabled=*/false);
        const GraphParams gp = lift_params(tape, at, false);
        return build(tape, mlp_forward(tape, spec, gp, batch))->scalar();
    };
    f.gradient = [=](const ParameterVector& at) {
        ad::Tape tape;
        const GraphParams gp = lift_params(tape, at);
        auto loss = build(tape, mlp_forward(tape, spec, gp, batch));
        tape.backward(loss);
        return collect_gradients(gp, at);
    };
    return f;
}

} // namespace

TEST_CASE("softmax: symmetric logits give the uniform distribution") {
    ad::Tape tape;
    auto p = tape.softmax_rows(tape.constant(Matrix::row_vector({0.0, 0.0})));
    CHECK(p->data()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p->data()[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("softmax: [ln 2, 0] maps to [2/3, 1/3]") {
    ad::Tape tape;
    auto p = tape.softmax_rows(tape.constant(Matrix::row_vector({std::log(2.0), 0.0})));
    CHECK(std::fabs(p->data()[0] - 2.0 / 3.0) < 1e-12);
    CHECK(std::fabs(p->data()[1] - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("softmax: shift invariance and simplex outputs") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = rng.normal(), b = rng.normal(), c = rng.normal();
        ad::Tape tape;
        auto p = tape.softmax_rows(tape.constant(Matrix::row_vector({a, b})));
        auto q = tape.softmax_rows(tape.constant(Matrix::row_vector({c + a, c + b})));
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(std::fabs(p->data()[k] - q->data()[k]) < 1e-12);
            CHECK(p->data()[k] > 0.0);
            CHECK(p->data()[k] < 1.0);
        }
        CHECK(std::fabs(p->data()[0] + p->data()[1] - 1.0) <= 1e-12);
    }
}

TEST_CASE("softmax: non-finite logits are a domain error") {
    ad::Tape tape;
    auto bad = tape.constant(Matrix::row_vector({1.0, std::numeric_limits<double>::infinity()}));
    CHECK_THROWS_AS(tape.softmax_rows(bad), DomainError);
}

TEST_CASE("backward: d(x^2)/dx at x=3 is 6") {
    ad::Tape tape;
    auto x = tape.input(Matrix::scalar(3.0), true);
    auto y = tape.mul(x, x);
    tape.backward(y);
    CHECK(x->grad()[0] == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("backward: twice without reset is an error; zero_grad re-arms") {
    ad::Tape tape;
    auto x = tape.input(Matrix::scalar(2.0), true);
    auto y = tape.mul(x, x);
    tape.backward(y);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
    tape.zero_grad();
    tape.backward(y);
    CHECK(x->grad()[0] == doctest::Approx(4.0));
}

TEST_CASE("backward: loss must be scalar") {
    ad::Tape tape;
    auto x = tape.input(Matrix::row_vector({1.0, 2.0}), true);
    auto y = tape.relu(x);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
}

TEST_CASE("backward: cross-entropy of softmax gives p - onehot") {
    Rng rng(5);
    const Matrix logits = random_matrix(3, 4, rng);
    const std::vector<int> labels = {2, 0, 3};

    ad::Tape tape;
    auto z = tape.input(logits, true);
    auto p = tape.softmax_rows(z);
    auto loss = cross_entropy_loss(tape, p, labels);
    tape.backward(loss);

    // Oracle: d/dz of mean CE is (softmax(z) - onehot) / n.
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double onehot = labels[r] == static_cast<int>(c) ? 1.0 : 0.0;
            const double expected = (p->matrix()(r, c) - onehot) / 3.0;
            CHECK(std::fabs(z->grad()[r * 4 + c] - expected) < 1e-10);
        }
    }
}

TEST_CASE("backward: replaying the record reproduces outputs bit-exactly") {
    Rng rng(7);
    const MlpSpec spec{{3, 5, 4}, "relu", 21};
    const Mlp model = Mlp::build(spec);
    const Matrix batch = random_matrix(4, 3, rng);

    ad::Tape tape;
    const GraphParams gp = lift_params(tape, model.params());
    auto probs = mlp_forward(tape, spec, gp, batch);
    const std::vector<double> before = probs->data();
    tape.replay();
    CHECK(probs->data() == before);
}

TEST_CASE("determinism: identical seeds give bit-identical gradients") {
    auto run = [] {
        Rng rng(123);
        const MlpSpec spec{{3, 5, 4}, "relu", 9};
        const Mlp model = Mlp::build(spec);
        const Matrix batch = random_matrix(4, 3, rng);
        std::vector<int> labels = {0, 1, 2, 3};
        ad::Tape tape;
        const GraphParams gp = lift_params(tape, model.params());
        auto loss = cross_entropy_loss(tape, mlp_forward(tape, spec, gp, batch), labels);
        tape.backward(loss);
        return collect_gradients(gp, model.params());
    };
    const ParameterVector a = run();
    const ParameterVector b = run();
    for (std::size_t i = 0; i < a.total_len(); ++i) CHECK(a.get_flat(i) == b.get_flat(i));
}

TEST_CASE("finite_difference_check: exact on a quadratic") {
    ParameterVector at(
        {ParamGroup{"w", 1, 3, {0.5, -1.25, 2.0}}, ParamGroup{"b", 1, 2, {3.0, -0.5}}});
    ad::ScalarField f;
    f.value = [](const ParameterVector& p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.total_len(); ++i) acc += p.get_flat(i) * p.get_flat(i);
        return acc;
    };
    f.gradient = [](const ParameterVector& p) {
        ParameterVector g = p;
        g.scale(2.0);
        return g;
    };
    CHECK(ad::finite_difference_check(f, at, 1e-6).max_rel_error < 1e-9);
}

TEST_CASE("finite_difference_check: MCL through an MLP") {
    Rng rng(31);
    const MlpSpec spec{{3, 5, 3}, "relu", 77};
    const Mlp model = Mlp::build(spec);
    const Matrix batch = random_matrix(4, 3, rng);
    const std::vector<int> labels = {0, 1, 0, 2};
    const PairwiseLabelSet targets = similarity_from_labels(labels, enumerate_pairs(4));

    const auto f = taped_loss_field(spec, batch, [=](ad::Tape& t, const ad::ValuePtr& p) {
        return mcl_loss(t, p, targets);
    });
    CHECK(ad::finite_difference_check(f, model.params(), 1e-6).max_rel_error < 1e-5);
}

TEST_CASE("finite_difference_check: KCL away from hinge kinks") {
    Rng rng(47);
    const double sigma = 2.0;
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 3 && seed < 40; ++seed) {
        const MlpSpec spec{{3, 5, 3}, "relu", seed};
        const Mlp model = Mlp::build(spec);
        const Matrix batch = random_matrix(4, 3, rng);
        const std::vector<int> labels = {0, 1, 0, 2};
        const PairwiseLabelSet targets = similarity_from_labels(labels, enumerate_pairs(4));

        // Skip instances where any dissimilar pair sits near the hinge kink.
        const Matrix probs = model.predict(batch);
        bool near_kink = false;
        const PairIndexList pairs = enumerate_pairs(4);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            if (targets.values[p] == 1.0) continue;
            const auto& [i, j] = pairs[p];
            double kl_ij = 0.0, kl_ji = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                kl_ij += probs(i, c) * (std::log(probs(i, c)) - std::log(probs(j, c)));
                kl_ji += probs(j, c) * (std::log(probs(j, c)) - std::log(probs(i, c)));
            }
            if (std::fabs(kl_ij - sigma) < 1e-3 || std::fabs(kl_ji - sigma) < 1e-3) {
                near_kink = true;
                break;
            }
        }
        if (near_kink) continue;

        const auto f = taped_loss_field(spec, batch, [=](ad::Tape& t, const ad::ValuePtr& p) {
            return kcl_loss(t, p, targets, sigma);
        });
        CHECK(ad::finite_difference_check(f, model.params(), 1e-6).max_rel_error < 1e-5);
        ++checked;
    }
    CHECK(checked == 3);
}

TEST_CASE("elementwise ops: div gradient matches the quotient rule") {
    ad::Tape tape;
    auto a = tape.input(Matrix::row_vector({1.5, -2.0}), true);
    auto b = tape.input(Matrix::row_vector({0.5, 4.0}), true);
    auto loss = tape.sum(tape.div(a, b));
    tape.backward(loss);
    CHECK(a->grad()[0] == doctest::Approx(1.0 / 0.5));
    CHECK(a->grad()[1] == doctest::Approx(1.0 / 4.0));
    CHECK(b->grad()[0] == doctest::Approx(-1.5 / 0.25));
    CHECK(b->grad()[1] == doctest::Approx(2.0 / 16.0));
}

TEST_CASE("shape contracts: mismatched elementwise operands are rejected") {
    ad::Tape tape;
    auto a = tape.constant(Matrix(2, 2));
    auto b = tape.constant(Matrix(2, 3));
    CHECK_THROWS_AS(tape.add(a, b), ContractError);
    CHECK_THROWS_AS(tape.mul(a, b), ContractError);
}
