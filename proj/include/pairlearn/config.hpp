#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairlearn/landscape.hpp"
#include "pairlearn/mlp.hpp"
#include "pairlearn/similarity.hpp"
#include "pairlearn/trainer.hpp"

namespace pairlearn {

struct BlobParams {
    int classes = 4;
    int per_class = 500;
    int dim = 2;
    double separation = 5.0;
    double spread = 0.5;
    std::uint64_t seed = 1;
};

// Exactly one of `path` / `blobs` selects the dataset.
struct DataConfig {
    std::optional<std::string> path;
    bool has_labels = true;
    std::optional<BlobParams> blobs;
};

enum class Paradigm { Supervised, Transfer, Semi };

struct SimilarityConfig {
    NoiseSpec oracle;
    bool augment = true;
    double augmentation_scale = 0.1;
    std::optional<double> labeled_fraction; // required by the semi paradigm
    bool warm_start = true;
};

struct OutputConfig {
    std::string dataset = "dataset.csv";
    std::string checkpoint = "model.ckpt";
    std::string metrics = "metrics.csv";
    std::string surface = "surface.csv";
};

struct EvalConfig {
    std::optional<std::string> checkpoint;
    std::optional<std::size_t> k; // must match the checkpoint when present
    Objective loss = Objective::Mcl;
    bool report_ndc = true;
};

struct LandscapeConfig {
    std::string projection = "random"; // "random" | "mutual"
    std::vector<std::string> checkpoints;
    Objective loss = Objective::Mcl;
    GridSpec grid;
    std::uint64_t seed = 0;
    bool log_output = false;
};

// Whole experiment document. Parsing is strict: unknown keys anywhere are
// fatal so a misspelled hyperparameter cannot silently fall back to defaults.
struct ExperimentConfig {
    DataConfig data;
    MlpSpec model;
    TrainConfig train;
    Paradigm paradigm = Paradigm::Supervised;
    SimilarityConfig similarity;
    OutputConfig output;
    EvalConfig eval;
    LandscapeConfig landscape;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

Objective parse_objective(const std::string& name);

} // namespace pairlearn
