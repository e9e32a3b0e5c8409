#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pairlearn/error.hpp"

namespace pairlearn {

// One named block of trainable values. Weight matrices keep their (rows, cols)
// layout; bias vectors use rows == 1.
struct ParamGroup {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// Flat, named, grouped view of all trainable parameters. Linear operations
// preserve the group structure.
class ParameterVector {
public:
    ParameterVector() = default;
    explicit ParameterVector(std::vector<ParamGroup> groups) : groups_(std::move(groups)) {
        for (const auto& g : groups_) {
            if (g.values.size() != g.rows * g.cols) {
                throw ContractError("ParameterVector: group '" + g.name +
                                    "' size does not match rows*cols");
            }
            total_ += g.values.size();
        }
    }

    std::size_t group_count() const { return groups_.size(); }
    const ParamGroup& group(std::size_t i) const { return groups_[i]; }
    ParamGroup& group(std::size_t i) { return groups_[i]; }
    std::size_t total_len() const { return total_; }
    bool empty() const { return groups_.empty(); }

    bool same_structure(const ParameterVector& other) const {
        if (groups_.size() != other.groups_.size()) return false;
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            const auto& a = groups_[i];
            const auto& b = other.groups_[i];
            if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
        }
        return true;
    }

    double get_flat(std::size_t i) const {
        auto [g, off] = locate(i);
        return groups_[g].values[off];
    }
    void set_flat(std::size_t i, double v) {
        auto [g, off] = locate(i);
        groups_[g].values[off] = v;
    }

    // this += c * other
    void add_scaled(const ParameterVector& other, double c) {
        require_same_structure(other, "add_scaled");
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            auto& dst = groups_[g].values;
            const auto& src = other.groups_[g].values;
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
        }
    }

    void scale(double c) {
        for (auto& g : groups_)
            for (auto& v : g.values) v *= c;
    }

    void fill(double c) {
        for (auto& g : groups_)
            for (auto& v : g.values) v = c;
    }

    // base + a*d1 + b*d2, evaluated as base + (a*d1 + b*d2) per element so the
    // result is bit-symmetric under swapping (a, d1) with (b, d2).
    static ParameterVector lin_comb(const ParameterVector& base, double a,
                                    const ParameterVector& d1, double b,
                                    const ParameterVector& d2) {
        base.require_same_structure(d1, "lin_comb");
        base.require_same_structure(d2, "lin_comb");
        ParameterVector out = base;
        for (std::size_t g = 0; g < out.groups_.size(); ++g) {
            auto& dst = out.groups_[g].values;
            const auto& u = d1.groups_[g].values;
            const auto& v = d2.groups_[g].values;
            for (std::size_t i = 0; i < dst.size(); ++i) {
                const double step = a * u[i] + b * v[i];
                dst[i] += step;
            }
        }
        return out;
    }

    void require_same_structure(const ParameterVector& other, const char* what) const {
        if (!same_structure(other)) {
            throw ContractError(std::string(what) + ": parameter structures differ");
        }
    }

private:
    std::pair<std::size_t, std::size_t> locate(std::size_t i) const {
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (i < groups_[g].values.size()) return {g, i};
            i -= groups_[g].values.size();
        }
        throw ContractError("ParameterVector: flat index out of range");
    }

    std::vector<ParamGroup> groups_;
    std::size_t total_ = 0;
};

} // namespace pairlearn
