#pragma once

#include <cstdint>
#include <vector>

#include "pairlearn/params.hpp"

namespace pairlearn {

enum class OptimizerKind { SgdMomentum, Adam };

struct OptimizerSettings {
    OptimizerKind kind = OptimizerKind::Adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Flat first/second-moment state over the parameter vector. Adam uses
// bias-corrected moments; SGD uses classical momentum.
class Optimizer {
public:
    Optimizer(OptimizerSettings settings, std::size_t param_len);

    void step(ParameterVector& params, const ParameterVector& grads, double learning_rate);

private:
    OptimizerSettings settings_;
    std::vector<double> m_;
    std::vector<double> v_;
    long step_count_ = 0;
};

} // namespace pairlearn
