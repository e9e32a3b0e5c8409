#include "pairlearn/landscape.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include "pairlearn/error.hpp"
#include "pairlearn/rng.hpp"

namespace pairlearn {

void GridSpec::validate() const {
    if (resolution < 2) throw ConfigError("GridSpec: resolution must be >= 2");
    if (alpha_lo > 0.0 || alpha_hi < 0.0 || beta_lo > 0.0 || beta_hi < 0.0) {
        throw ConfigError("GridSpec: both ranges must contain 0");
    }
    if (!(alpha_lo < alpha_hi) || !(beta_lo < beta_hi)) {
        throw ConfigError("GridSpec: ranges must be non-degenerate");
    }
}

ParameterVector filter_normalize(const ParameterVector& direction,
                                 const ParameterVector& reference) {
    direction.require_same_structure(reference, "filter_normalize");
    ParameterVector out = direction;
    for (std::size_t g = 0; g < out.group_count(); ++g) {
        ParamGroup& grp = out.group(g);
        const ParamGroup& ref = reference.group(g);
        for (std::size_t r = 0; r < grp.rows; ++r) {
            double dir_sq = 0.0, ref_sq = 0.0;
            for (std::size_t c = 0; c < grp.cols; ++c) {
                const double d = grp.values[r * grp.cols + c];
                const double t = ref.values[r * grp.cols + c];
                dir_sq += d * d;
                ref_sq += t * t;
            }
            const double dir_norm = std::sqrt(dir_sq);
            const double scale = dir_norm == 0.0 ? 0.0 : std::sqrt(ref_sq) / dir_norm;
            for (std::size_t c = 0; c < grp.cols; ++c) grp.values[r * grp.cols + c] *= scale;
        }
    }
    return out;
}

std::pair<ParameterVector, ParameterVector> random_directions(const ParameterVector& reference,
                                                              std::uint64_t seed) {
    Rng rng(seed);
    auto draw = [&] {
        ParameterVector d = reference;
        for (std::size_t g = 0; g < d.group_count(); ++g) {
            for (auto& v : d.group(g).values) v = rng.normal();
        }
        return filter_normalize(d, reference);
    };
    ParameterVector delta = draw();
    ParameterVector eta = draw();
    return {std::move(delta), std::move(eta)};
}

std::pair<ParameterVector, ParameterVector> mutual_directions(const ParameterVector& origin,
                                                              const ParameterVector& other1,
                                                              const ParameterVector& other2) {
    origin.require_same_structure(other1, "mutual_directions");
    origin.require_same_structure(other2, "mutual_directions");
    ParameterVector delta = other1;
    delta.add_scaled(origin, -1.0);
    ParameterVector eta = other2;
    eta.add_scaled(origin, -1.0);
    return {std::move(delta), std::move(eta)};
}

double dataset_loss(const MlpSpec& spec, const ParameterVector& theta, const Matrix& features,
                    const std::vector<int>& labels, Objective loss, double sigma) {
    const Mlp model(spec, theta);
    const Matrix probs = model.predict(features);
    switch (loss) {
        case Objective::CrossEntropy: return dataset_ce_loss(probs, labels);
        case Objective::Mcl: return dataset_mcl_loss(probs, labels);
        case Objective::Kcl:
        default: return dataset_kcl_loss(probs, labels, sigma);
    }
}

unsigned effective_thread_count(unsigned requested) {
    unsigned cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("PAIRLEARN_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) cap = std::min<unsigned>(cap, static_cast<unsigned>(parsed));
    }
    if (requested == 0) return cap;
    return std::min(requested, cap);
}

SurfaceResult evaluate_surface(const MlpSpec& spec, const ParameterVector& theta,
                               const ParameterVector& delta, const ParameterVector& eta,
                               const GridSpec& grid, Objective loss, const Matrix& features,
                               const std::vector<int>& labels, double sigma, unsigned threads) {
    grid.validate();
    spec.validate();
    theta.require_same_structure(delta, "evaluate_surface");
    theta.require_same_structure(eta, "evaluate_surface");
    if (theta.total_len() != spec.param_count()) {
        throw ContractError("evaluate_surface: parameters do not match the model spec");
    }
    if (features.rows != labels.size()) {
        throw ContractError("evaluate_surface: one label per feature row required");
    }
    if (loss == Objective::Kcl && !(sigma > 0.0)) {
        throw ContractError("evaluate_surface: KCL sigma must be positive");
    }

    SurfaceResult out;
    out.grid = grid;
    out.loss_name = objective_name(loss);
    const std::size_t res = static_cast<std::size_t>(grid.resolution);
    out.values.assign(res * res, 0.0);

    auto eval_cell = [&](std::size_t cell) {
        const int ai = static_cast<int>(cell / res);
        const int bi = static_cast<int>(cell % res);
        const ParameterVector point =
            ParameterVector::lin_comb(theta, grid.alpha_at(ai), delta, grid.beta_at(bi), eta);
        double v;
        try {
            v = dataset_loss(spec, point, features, labels, loss, sigma);
        } catch (const DomainError&) {
            v = std::numeric_limits<double>::infinity();
        }
        out.values[cell] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    const std::size_t total = res * res;
    const unsigned workers = std::min<unsigned>(effective_thread_count(threads),
                                                static_cast<unsigned>(total));
    if (workers <= 1) {
        for (std::size_t cell = 0; cell < total; ++cell) eval_cell(cell);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t cell = w; cell < total; cell += workers) eval_cell(cell);
            });
        }
        for (auto& t : pool) t.join();
    }
    return out;
}

void write_surface_csv(const SurfaceResult& surface, const std::string& path,
                       bool log10_transform) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("surface CSV: cannot open '" + path + "' for writing");
    out << "alpha,beta,loss\n";
    char buf[128];
    const int res = surface.grid.resolution;
    for (int ai = 0; ai < res; ++ai) {
        for (int bi = 0; bi < res; ++bi) {
            double v = surface.at(ai, bi);
            if (log10_transform) v = std::log10(v);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", surface.grid.alpha_at(ai),
                          surface.grid.beta_at(bi), v);
            out << buf;
        }
    }
    if (!out) throw FormatError("surface CSV: write failed for '" + path + "'");
}

} // namespace pairlearn
