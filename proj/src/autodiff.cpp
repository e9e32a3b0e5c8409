#include "pairlearn/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "pairlearn/numeric.hpp"

namespace pairlearn::ad {

namespace {

void check_same_shape(const ValuePtr& a, const ValuePtr& b, const char* op) {
    if (a->rows() != b->rows() || a->cols() != b->cols()) {
        throw ContractError(std::string(op) + ": operand shapes differ");
    }
}

} // namespace

ValuePtr Tape::make_node(std::size_t rows, std::size_t cols,
                         std::initializer_list<const ValuePtr*> deps) {
    auto node = std::make_shared<Value>();
    node->value_ = Matrix(rows, cols);
    if (grad_enabled_) {
        for (const ValuePtr* dep : deps) {
            if ((*dep)->requires_grad_) {
                node->requires_grad_ = true;
                break;
            }
        }
    }
    if (node->requires_grad_) node->grad_.assign(rows * cols, 0.0);
    nodes_.push_back(node);
    return node;
}

void Tape::record(std::function<void()> fwd, std::function<void()> bwd) {
    ops_.push_back({std::move(fwd), grad_enabled_ ? std::move(bwd) : std::function<void()>{}});
}

ValuePtr Tape::input(Matrix m, bool requires_grad) {
    auto node = std::make_shared<Value>();
    node->value_ = std::move(m);
    node->requires_grad_ = grad_enabled_ && requires_grad;
    if (node->requires_grad_) node->grad_.assign(node->value_.size(), 0.0);
    nodes_.push_back(node);
    return node;
}

ValuePtr Tape::affine(const ValuePtr& x, const ValuePtr& w, const ValuePtr& b) {
    const std::size_t n = x->rows(), din = x->cols(), dout = w->rows();
    if (w->cols() != din) throw ContractError("affine: weight cols must match input cols");
    if (b->rows() != 1 || b->cols() != dout) {
        throw ContractError("affine: bias must be 1 x output-dim");
    }
    auto out = make_node(n, dout, {&x, &w, &b});
    auto fwd = [xp = x.get(), wp = w.get(), bp = b.get(), op = out.get()] {
        const auto& X = xp->value_;
        const auto& W = wp->value_;
        const auto& B = bp->value_;
        auto& O = op->value_;
        for (std::size_t r = 0; r < X.rows; ++r) {
            for (std::size_t o = 0; o < W.rows; ++o) {
                double acc = 0.0;
                for (std::size_t i = 0; i < X.cols; ++i) acc += X(r, i) * W(o, i);
                O(r, o) = acc + B(0, o);
            }
        }
    };
    fwd();
    record(fwd, [xp = x.get(), wp = w.get(), bp = b.get(), op = out.get()] {
        const auto& X = xp->value_;
        const auto& W = wp->value_;
        const auto& G = op->grad_;
        const std::size_t n = X.rows, din = X.cols, dout = W.rows;
        if (xp->requires_grad_) {
            // Contraction runs over the output axis; keep it order-canonical
            // so permuting output nodes permutes gradients exactly.
            std::vector<double> terms(dout);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t i = 0; i < din; ++i) {
                    for (std::size_t o = 0; o < dout; ++o) {
                        terms[o] = G[r * dout + o] * W(o, i);
                    }
                    xp->grad_[r * din + i] += canonical_sum(terms);
                }
            }
        }
        if (wp->requires_grad_) {
            for (std::size_t o = 0; o < dout; ++o) {
                for (std::size_t i = 0; i < din; ++i) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < n; ++r) acc += G[r * dout + o] * X(r, i);
                    wp->grad_[o * din + i] += acc;
                }
            }
        }
        if (bp->requires_grad_) {
            for (std::size_t o = 0; o < dout; ++o) {
                double acc = 0.0;
                for (std::size_t r = 0; r < n; ++r) acc += G[r * dout + o];
                bp->grad_[o] += acc;
            }
        }
    });
    return out;
}

ValuePtr Tape::relu(const ValuePtr& x) {
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get()] {
        const auto& a = xp->value_.data;
        auto& o = op->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] > 0.0 ? a[i] : 0.0;
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        const auto& a = xp->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > 0.0) xp->grad_[i] += op->grad_[i];
        }
    });
    return out;
}

ValuePtr Tape::softmax_rows(const ValuePtr& x) {
    for (double v : x->data()) {
        if (!std::isfinite(v)) throw DomainError("softmax_rows: non-finite logit");
    }
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get()] {
        const auto& X = xp->value_;
        auto& O = op->value_;
        for (std::size_t r = 0; r < X.rows; ++r) {
            double m = X(r, 0);
            for (std::size_t c = 1; c < X.cols; ++c) m = std::max(m, X(r, c));
            for (std::size_t c = 0; c < X.cols; ++c) O(r, c) = std::exp(X(r, c) - m);
            const double denom = canonical_sum(O.row(r));
            for (std::size_t c = 0; c < X.cols; ++c) O(r, c) /= denom;
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        const auto& P = op->value_;
        const auto& G = op->grad_;
        const std::size_t cols = P.cols;
        for (std::size_t r = 0; r < P.rows; ++r) {
            const double dot =
                canonical_dot({G.data() + r * cols, cols}, P.row(r));
            for (std::size_t c = 0; c < cols; ++c) {
                xp->grad_[r * cols + c] += P(r, c) * (G[r * cols + c] - dot);
            }
        }
    });
    return out;
}

ValuePtr Tape::log(const ValuePtr& x) {
    for (double v : x->data()) {
        if (!(v > 0.0)) throw DomainError("log: input must be strictly positive");
    }
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get()] {
        const auto& a = xp->value_.data;
        auto& o = op->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = std::log(a[i]);
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        const auto& a = xp->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) xp->grad_[i] += op->grad_[i] / a[i];
    });
    return out;
}

ValuePtr Tape::exp(const ValuePtr& x) {
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get()] {
        const auto& a = xp->value_.data;
        auto& o = op->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = std::exp(a[i]);
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        const auto& o = op->value_.data;
        for (std::size_t i = 0; i < o.size(); ++i) xp->grad_[i] += op->grad_[i] * o[i];
    });
    return out;
}

ValuePtr Tape::add(const ValuePtr& a, const ValuePtr& b) {
    check_same_shape(a, b, "add");
    auto out = make_node(a->rows(), a->cols(), {&a, &b});
    auto fwd = [ap = a.get(), bp = b.get(), op = out.get()] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = ap->value_.data[i] + bp->value_.data[i];
        }
    };
    fwd();
    record(fwd, [ap = a.get(), bp = b.get(), op = out.get()] {
        if (ap->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i) ap->grad_[i] += op->grad_[i];
        if (bp->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i) bp->grad_[i] += op->grad_[i];
    });
    return out;
}

ValuePtr Tape::sub(const ValuePtr& a, const ValuePtr& b) {
    check_same_shape(a, b, "sub");
    auto out = make_node(a->rows(), a->cols(), {&a, &b});
    auto fwd = [ap = a.get(), bp = b.get(), op = out.get()] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = ap->value_.data[i] - bp->value_.data[i];
        }
    };
    fwd();
    record(fwd, [ap = a.get(), bp = b.get(), op = out.get()] {
        if (ap->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i) ap->grad_[i] += op->grad_[i];
        if (bp->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i) bp->grad_[i] -= op->grad_[i];
    });
    return out;
}

ValuePtr Tape::mul(const ValuePtr& a, const ValuePtr& b) {
    check_same_shape(a, b, "mul");
    auto out = make_node(a->rows(), a->cols(), {&a, &b});
    auto fwd = [ap = a.get(), bp = b.get(), op = out.get()] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = ap->value_.data[i] * bp->value_.data[i];
        }
    };
    fwd();
    record(fwd, [ap = a.get(), bp = b.get(), op = out.get()] {
        if (ap->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i)
                ap->grad_[i] += op->grad_[i] * bp->value_.data[i];
        if (bp->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i)
                bp->grad_[i] += op->grad_[i] * ap->value_.data[i];
    });
    return out;
}

ValuePtr Tape::div(const ValuePtr& a, const ValuePtr& b) {
    check_same_shape(a, b, "div");
    for (double v : b->data()) {
        if (v == 0.0) throw DomainError("div: zero divisor");
    }
    auto out = make_node(a->rows(), a->cols(), {&a, &b});
    auto fwd = [ap = a.get(), bp = b.get(), op = out.get()] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = ap->value_.data[i] / bp->value_.data[i];
        }
    };
    fwd();
    record(fwd, [ap = a.get(), bp = b.get(), op = out.get()] {
        const auto& bv = bp->value_.data;
        if (ap->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i)
                ap->grad_[i] += op->grad_[i] / bv[i];
        if (bp->requires_grad_)
            for (std::size_t i = 0; i < op->grad_.size(); ++i)
                bp->grad_[i] -= op->grad_[i] * op->value_.data[i] / bv[i];
    });
    return out;
}

ValuePtr Tape::scale(const ValuePtr& x, double c) {
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get(), c] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = xp->value_.data[i] * c;
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get(), c] {
        if (!xp->requires_grad_) return;
        for (std::size_t i = 0; i < op->grad_.size(); ++i) xp->grad_[i] += op->grad_[i] * c;
    });
    return out;
}

ValuePtr Tape::add_scalar(const ValuePtr& x, double c) {
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get(), c] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = xp->value_.data[i] + c;
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        for (std::size_t i = 0; i < op->grad_.size(); ++i) xp->grad_[i] += op->grad_[i];
    });
    return out;
}

ValuePtr Tape::divide_by(const ValuePtr& x, double c) {
    if (c == 0.0) throw ContractError("divide_by: zero divisor");
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get(), c] {
        for (std::size_t i = 0; i < op->value_.size(); ++i) {
            op->value_.data[i] = xp->value_.data[i] / c;
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get(), c] {
        if (!xp->requires_grad_) return;
        for (std::size_t i = 0; i < op->grad_.size(); ++i) xp->grad_[i] += op->grad_[i] / c;
    });
    return out;
}

ValuePtr Tape::clamp(const ValuePtr& x, double lo, double hi) {
    if (!(lo < hi)) throw ContractError("clamp: lo must be < hi");
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get(), lo, hi] {
        const auto& a = xp->value_.data;
        auto& o = op->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = std::min(std::max(a[i], lo), hi);
    };
    fwd();
    // Gradient passes only strictly inside the interval; the boundary uses the
    // zero subgradient, matching the hinge-at-kink convention.
    record(fwd, [xp = x.get(), op = out.get(), lo, hi] {
        if (!xp->requires_grad_) return;
        const auto& a = xp->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > lo && a[i] < hi) xp->grad_[i] += op->grad_[i];
        }
    });
    return out;
}

ValuePtr Tape::clamp_min(const ValuePtr& x, double lo) {
    auto out = make_node(x->rows(), x->cols(), {&x});
    auto fwd = [xp = x.get(), op = out.get(), lo] {
        const auto& a = xp->value_.data;
        auto& o = op->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] > lo ? a[i] : lo;
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get(), lo] {
        if (!xp->requires_grad_) return;
        const auto& a = xp->value_.data;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > lo) xp->grad_[i] += op->grad_[i];
        }
    });
    return out;
}

ValuePtr Tape::gather_rows(const ValuePtr& x, std::vector<std::size_t> idx) {
    for (std::size_t r : idx) {
        if (r >= x->rows()) throw ContractError("gather_rows: row index out of range");
    }
    auto out = make_node(idx.size(), x->cols(), {&x});
    auto shared_idx = std::make_shared<std::vector<std::size_t>>(std::move(idx));
    auto fwd = [xp = x.get(), op = out.get(), shared_idx] {
        const auto& X = xp->value_;
        auto& O = op->value_;
        for (std::size_t r = 0; r < shared_idx->size(); ++r) {
            const std::size_t src = (*shared_idx)[r];
            for (std::size_t c = 0; c < X.cols; ++c) O(r, c) = X(src, c);
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get(), shared_idx] {
        if (!xp->requires_grad_) return;
        const std::size_t cols = xp->value_.cols;
        for (std::size_t r = 0; r < shared_idx->size(); ++r) {
            const std::size_t dst = (*shared_idx)[r];
            for (std::size_t c = 0; c < cols; ++c) {
                xp->grad_[dst * cols + c] += op->grad_[r * cols + c];
            }
        }
    });
    return out;
}

ValuePtr Tape::pick_per_row(const ValuePtr& x, std::vector<std::size_t> col_idx) {
    if (col_idx.size() != x->rows()) {
        throw ContractError("pick_per_row: one column index per row required");
    }
    for (std::size_t c : col_idx) {
        if (c >= x->cols()) throw ContractError("pick_per_row: column index out of range");
    }
    auto out = make_node(x->rows(), 1, {&x});
    auto shared_idx = std::make_shared<std::vector<std::size_t>>(std::move(col_idx));
    auto fwd = [xp = x.get(), op = out.get(), shared_idx] {
        const auto& X = xp->value_;
        for (std::size_t r = 0; r < X.rows; ++r) {
            op->value_.data[r] = X(r, (*shared_idx)[r]);
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get(), shared_idx] {
        if (!xp->requires_grad_) return;
        const std::size_t cols = xp->value_.cols;
        for (std::size_t r = 0; r < shared_idx->size(); ++r) {
            xp->grad_[r * cols + (*shared_idx)[r]] += op->grad_[r];
        }
    });
    return out;
}

ValuePtr Tape::pair_inner(const ValuePtr& x, std::span<const IndexPair> pairs) {
    for (const auto& [i, j] : pairs) {
        if (i >= x->rows() || j >= x->rows()) {
            throw ContractError("pair_inner: pair index out of range");
        }
    }
    auto out = make_node(pairs.size(), 1, {&x});
    auto shared_pairs = std::make_shared<std::vector<IndexPair>>(pairs.begin(), pairs.end());
    auto fwd = [xp = x.get(), op = out.get(), shared_pairs] {
        const auto& X = xp->value_;
        for (std::size_t p = 0; p < shared_pairs->size(); ++p) {
            const auto& [i, j] = (*shared_pairs)[p];
            op->value_.data[p] = canonical_dot(X.row(i), X.row(j));
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get(), shared_pairs] {
        if (!xp->requires_grad_) return;
        const auto& X = xp->value_;
        const std::size_t cols = X.cols;
        for (std::size_t p = 0; p < shared_pairs->size(); ++p) {
            const auto& [i, j] = (*shared_pairs)[p];
            const double g = op->grad_[p];
            for (std::size_t c = 0; c < cols; ++c) {
                xp->grad_[i * cols + c] += g * X(j, c);
                xp->grad_[j * cols + c] += g * X(i, c);
            }
        }
    });
    return out;
}

ValuePtr Tape::row_sum(const ValuePtr& x) {
    auto out = make_node(x->rows(), 1, {&x});
    auto fwd = [xp = x.get(), op = out.get()] {
        const auto& X = xp->value_;
        for (std::size_t r = 0; r < X.rows; ++r) {
            op->value_.data[r] = canonical_sum(X.row(r));
        }
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        const std::size_t cols = xp->value_.cols;
        for (std::size_t r = 0; r < xp->value_.rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) xp->grad_[r * cols + c] += op->grad_[r];
        }
    });
    return out;
}

ValuePtr Tape::sum(const ValuePtr& x) {
    auto out = make_node(1, 1, {&x});
    auto fwd = [xp = x.get(), op = out.get()] {
        double acc = 0.0;
        for (double v : xp->value_.data) acc += v;
        op->value_.data[0] = acc;
    };
    fwd();
    record(fwd, [xp = x.get(), op = out.get()] {
        if (!xp->requires_grad_) return;
        const double g = op->grad_[0];
        for (std::size_t i = 0; i < xp->grad_.size(); ++i) xp->grad_[i] += g;
    });
    return out;
}

ValuePtr Tape::mean(const ValuePtr& x) {
    if (x->size() == 0) throw ContractError("mean: empty operand");
    return divide_by(sum(x), static_cast<double>(x->size()));
}

void Tape::backward(const ValuePtr& loss) {
    if (!grad_enabled_) throw ContractError("backward: tape was built with gradients disabled");
    if (!loss->is_scalar()) throw ContractError("backward: loss must be a 1x1 scalar");
    if (backward_done_) {
        throw ContractError("backward: already run on this tape; call zero_grad first");
    }
    backward_done_ = true;
    if (!loss->requires_grad_) return; // nothing depends on trainable leaves
    loss->grad_[0] = 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
        if (it->backward) it->backward();
    }
}

void Tape::zero_grad() {
    for (auto& node : nodes_) {
        std::fill(node->grad_.begin(), node->grad_.end(), 0.0);
    }
    backward_done_ = false;
}

void Tape::replay() {
    for (auto& op : ops_) op.forward();
}

FdCheckResult finite_difference_check(const ScalarField& f, const ParameterVector& at,
                                      double eps) {
    if (!(eps > 0.0)) throw ContractError("finite_difference_check: eps must be positive");
    const ParameterVector analytic = f.gradient(at);
    ParameterVector probe = at;
    FdCheckResult result;
    const std::size_t n = at.total_len();
    for (std::size_t i = 0; i < n; ++i) {
        const double keep = probe.get_flat(i);
        probe.set_flat(i, keep + eps);
        const double up = f.value(probe);
        probe.set_flat(i, keep - eps);
        const double down = f.value(probe);
        probe.set_flat(i, keep);
        const double cdiff = (up - down) / (2.0 * eps);
        const double a = analytic.get_flat(i);
        const double denom = std::max({std::fabs(a), std::fabs(cdiff), 1e-12});
        const double rel = std::fabs(a - cdiff) / denom;
        if (rel > result.max_rel_error) {
            result.max_rel_error = rel;
            result.worst_index = i;
        }
        if (cdiff != 0.0) {
            result.min_nonzero_cdiff = std::min(result.min_nonzero_cdiff, std::fabs(cdiff));
        }
    }
    return result;
}

} // namespace pairlearn::ad
