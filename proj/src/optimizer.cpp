#include "pairlearn/optimizer.hpp"

#include <cmath>

#include "pairlearn/error.hpp"

namespace pairlearn {

Optimizer::Optimizer(OptimizerSettings settings, std::size_t param_len)
    : settings_(settings), m_(param_len, 0.0), v_(param_len, 0.0) {}

void Optimizer::step(ParameterVector& params, const ParameterVector& grads,
                     double learning_rate) {
    params.require_same_structure(grads, "Optimizer::step");
    if (params.total_len() != m_.size()) {
        throw ContractError("Optimizer::step: state length does not match parameters");
    }
    ++step_count_;
    std::size_t flat = 0;
    for (std::size_t g = 0; g < params.group_count(); ++g) {
        auto& p = params.group(g).values;
        const auto& grad = grads.group(g).values;
        for (std::size_t i = 0; i < p.size(); ++i, ++flat) {
            if (settings_.kind == OptimizerKind::SgdMomentum) {
                m_[flat] = settings_.momentum * m_[flat] + grad[i];
                p[i] -= learning_rate * m_[flat];
            } else {
                m_[flat] = settings_.beta1 * m_[flat] + (1.0 - settings_.beta1) * grad[i];
                v_[flat] = settings_.beta2 * v_[flat] + (1.0 - settings_.beta2) * grad[i] * grad[i];
                const double m_hat =
                    m_[flat] / (1.0 - std::pow(settings_.beta1, static_cast<double>(step_count_)));
                const double v_hat =
                    v_[flat] / (1.0 - std::pow(settings_.beta2, static_cast<double>(step_count_)));
                p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + settings_.epsilon);
            }
        }
    }
}

} // namespace pairlearn
