#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pairlearn/autodiff.hpp"
#include "pairlearn/matrix.hpp"
#include "pairlearn/params.hpp"

namespace pairlearn {

// Architecture of a multilayer perceptron classifier: layer_sizes runs from
// the input dimension to the number of output nodes K (the last entry).
struct MlpSpec {
    std::vector<std::size_t> layer_sizes;
    std::string activation = "relu";
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_nodes() const { return layer_sizes.back(); }
    std::size_t param_count() const;
};

// MLP with softmax outputs. Parameters are held as a ParameterVector with
// groups w1, b1, w2, b2, ... in layer order.
class Mlp {
public:
    // Seeded Glorot-uniform weights, zero biases.
    static Mlp build(const MlpSpec& spec);
    Mlp(MlpSpec spec, ParameterVector params);

    const MlpSpec& spec() const { return spec_; }
    const ParameterVector& params() const { return params_; }
    ParameterVector& params() { return params_; }
    void set_params(ParameterVector p);

    // Row-wise categorical distributions for a feature batch. Pure function of
    // (parameters, input).
    Matrix predict(const Matrix& batch) const;

    void save_checkpoint(const std::string& path) const;
    static Mlp load_checkpoint(const std::string& path);

private:
    MlpSpec spec_;
    ParameterVector params_;
};

// Parameter groups lifted into a tape as differentiable leaves.
struct GraphParams {
    std::vector<ad::ValuePtr> leaves; // one per group, same order as ParameterVector
};

GraphParams lift_params(ad::Tape& tape, const ParameterVector& params,
                        bool requires_grad = true);

// Forward pass through the recorded graph; returns the softmax output node.
ad::ValuePtr mlp_forward(ad::Tape& tape, const MlpSpec& spec, const GraphParams& gp,
                         const Matrix& batch);

// Collects leaf gradients into a ParameterVector mirroring `like`'s structure.
ParameterVector collect_gradients(const GraphParams& gp, const ParameterVector& like);

} // namespace pairlearn
