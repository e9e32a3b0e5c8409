#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pairlearn/matrix.hpp"
#include "pairlearn/params.hpp"

namespace pairlearn::ad {

class Tape;

// A node in a recorded dense computation: a value matrix plus, for nodes that
// participate in differentiation, a gradient buffer of identical shape.
class Value {
public:
    std::size_t rows() const { return value_.rows; }
    std::size_t cols() const { return value_.cols; }
    std::size_t size() const { return value_.size(); }
    bool is_scalar() const { return value_.rows == 1 && value_.cols == 1; }

    const Matrix& matrix() const { return value_; }
    const std::vector<double>& data() const { return value_.data; }
    double scalar() const {
        if (!is_scalar()) throw ContractError("Value::scalar: node is not 1x1");
        return value_.data[0];
    }

    bool requires_grad() const { return requires_grad_; }
    bool has_grad() const { return !grad_.empty(); }
    const std::vector<double>& grad() const {
        if (grad_.empty()) throw ContractError("Value::grad: node carries no gradient");
        return grad_;
    }

private:
    friend class Tape;
    Matrix value_;
    std::vector<double> grad_; // same shape as value_ when allocated
    bool requires_grad_ = false;
};

using ValuePtr = std::shared_ptr<Value>;
using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

// Records every applied operation in topological order. Replaying the record
// recomputes all outputs from the current leaf contents; running backward
// populates exact reverse-mode gradients. A tape owns its nodes and is
// single-threaded; independent tapes may run concurrently.
class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool grad_enabled() const { return grad_enabled_; }
    std::size_t num_ops() const { return ops_.size(); }

    // Leaves.
    ValuePtr input(Matrix m, bool requires_grad = false);
    ValuePtr constant(Matrix m) { return input(std::move(m), false); }

    // Dense ops. Shapes are validated; violations raise ContractError.
    ValuePtr affine(const ValuePtr& x, const ValuePtr& w, const ValuePtr& b);
    ValuePtr relu(const ValuePtr& x);
    ValuePtr softmax_rows(const ValuePtr& x);
    ValuePtr log(const ValuePtr& x);
    ValuePtr exp(const ValuePtr& x);
    ValuePtr add(const ValuePtr& a, const ValuePtr& b);
    ValuePtr sub(const ValuePtr& a, const ValuePtr& b);
    ValuePtr mul(const ValuePtr& a, const ValuePtr& b);
    ValuePtr div(const ValuePtr& a, const ValuePtr& b);
    ValuePtr scale(const ValuePtr& x, double c);
    ValuePtr add_scalar(const ValuePtr& x, double c);
    ValuePtr divide_by(const ValuePtr& x, double c);
    ValuePtr clamp(const ValuePtr& x, double lo, double hi);
    ValuePtr clamp_min(const ValuePtr& x, double lo);
    ValuePtr gather_rows(const ValuePtr& x, std::vector<std::size_t> idx);
    ValuePtr pick_per_row(const ValuePtr& x, std::vector<std::size_t> col_idx);
    ValuePtr pair_inner(const ValuePtr& x, std::span<const IndexPair> pairs);
    ValuePtr row_sum(const ValuePtr& x);
    ValuePtr sum(const ValuePtr& x);
    ValuePtr mean(const ValuePtr& x);

    // Reverse sweep from a scalar loss. Running it twice without zero_grad in
    // between is an error rather than silent accumulation.
    void backward(const ValuePtr& loss);

    // Clears all gradient buffers and re-arms backward.
    void zero_grad();

    // Recomputes every recorded op in order from the current leaf data.
    void replay();

private:
    struct OpRecord {
        std::function<void()> forward;
        std::function<void()> backward; // empty when gradients are disabled
    };

    ValuePtr make_node(std::size_t rows, std::size_t cols,
                       std::initializer_list<const ValuePtr*> deps);
    void record(std::function<void()> fwd, std::function<void()> bwd);

    std::vector<OpRecord> ops_;
    std::vector<ValuePtr> nodes_;
    bool grad_enabled_;
    bool backward_done_ = false;
};

// Scalar-valued function of a ParameterVector together with its reverse-mode
// gradient, as used by the gradient checker.
struct ScalarField {
    std::function<double(const ParameterVector&)> value;
    std::function<ParameterVector(const ParameterVector&)> gradient;
};

struct FdCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    // Conditioning diagnostic: the oracle cannot resolve coordinates whose
    // central difference sits near the roundoff floor eps_mach*|f|/(2 eps).
    double min_nonzero_cdiff = std::numeric_limits<double>::infinity();
};

// Central-difference check of f.gradient against (f(x+eps)-f(x-eps))/(2 eps),
// coordinate by coordinate. Returns the max of
// |analytic - cdiff| / max(|analytic|, |cdiff|, 1e-12).
FdCheckResult finite_difference_check(const ScalarField& f, const ParameterVector& at,
                                      double eps);

} // namespace pairlearn::ad
