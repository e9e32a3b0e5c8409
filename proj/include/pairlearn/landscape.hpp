#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pairlearn/dataset.hpp"
#include "pairlearn/mlp.hpp"
#include "pairlearn/trainer.hpp"

namespace pairlearn {

// 2-D evaluation grid around a solution. Both ranges must contain 0 so the
// solution itself lands on the grid at odd resolutions.
struct GridSpec {
    double alpha_lo = -1.0;
    double alpha_hi = 1.0;
    double beta_lo = -1.0;
    double beta_hi = 1.0;
    int resolution = 91;

    void validate() const;
    double alpha_at(int i) const {
        return alpha_lo + (static_cast<double>(i) * (alpha_hi - alpha_lo)) /
                              static_cast<double>(resolution - 1);
    }
    double beta_at(int j) const {
        return beta_lo + (static_cast<double>(j) * (beta_hi - beta_lo)) /
                             static_cast<double>(resolution - 1);
    }
};

// Loss values over the grid, row-major with the alpha index outermost. Cells
// where the loss is non-finite hold +infinity.
struct SurfaceResult {
    GridSpec grid;
    std::vector<double> values;
    std::string loss_name;
    std::string projection; // "random" or "mutual"
    std::uint64_t seed = 0;

    double at(int alpha_idx, int beta_idx) const {
        return values[static_cast<std::size_t>(alpha_idx) *
                          static_cast<std::size_t>(grid.resolution) +
                      static_cast<std::size_t>(beta_idx)];
    }
};

// Rescales each normalization unit of `direction` (every row of every group)
// to the corresponding unit norm of `reference`. Zero-norm direction units
// stay zero; zero-norm reference units zero the direction.
ParameterVector filter_normalize(const ParameterVector& direction,
                                 const ParameterVector& reference);

// Two independent seeded standard-normal directions, filter-normalized
// against the reference parameters.
std::pair<ParameterVector, ParameterVector> random_directions(const ParameterVector& reference,
                                                              std::uint64_t seed);

// Directions pointing from one solution toward two others; no normalization,
// so the endpoints (1,0) and (0,1) evaluate the other solutions exactly.
std::pair<ParameterVector, ParameterVector> mutual_directions(const ParameterVector& origin,
                                                              const ParameterVector& other1,
                                                              const ParameterVector& other2);

// Full-dataset loss at theta. For the pairwise objectives the targets are the
// label-implied similarities over all sample pairs.
double dataset_loss(const MlpSpec& spec, const ParameterVector& theta, const Matrix& features,
                    const std::vector<int>& labels, Objective loss, double sigma);

// Evaluates L(theta + alpha*delta + beta*eta) over every grid cell without
// training; theta is left untouched. Cells may be evaluated in parallel
// (thread count 0 picks the PAIRLEARN_THREADS / hardware default) with output
// identical for any thread count.
SurfaceResult evaluate_surface(const MlpSpec& spec, const ParameterVector& theta,
                               const ParameterVector& delta, const ParameterVector& eta,
                               const GridSpec& grid, Objective loss, const Matrix& features,
                               const std::vector<int>& labels, double sigma = 2.0,
                               unsigned threads = 0);

// Thread budget: the requested count, capped by PAIRLEARN_THREADS when set,
// defaulting to the hardware concurrency.
unsigned effective_thread_count(unsigned requested);

// Surface CSV: header "alpha,beta,loss", one row per cell, row-major. The
// optional transform writes log10 of each loss instead (useful for
// cross-entropy's dynamic range); stored values stay untouched.
void write_surface_csv(const SurfaceResult& surface, const std::string& path,
                       bool log10_transform = false);

} // namespace pairlearn
