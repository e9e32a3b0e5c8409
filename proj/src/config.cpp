#include "pairlearn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pairlearn/error.hpp"

namespace pairlearn {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
        throw ConfigError("config: section '" + section + "' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key '" + key + "' in section '" + section + "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

BlobParams parse_blobs(const json& j) {
    require_keys(j, "data.blobs",
                 {"classes", "per_class", "dim", "separation", "spread", "seed"});
    BlobParams b;
    b.classes = get_or(j, "classes", b.classes);
    b.per_class = get_or(j, "per_class", b.per_class);
    b.dim = get_or(j, "dim", b.dim);
    b.separation = get_or(j, "separation", b.separation);
    b.spread = get_or(j, "spread", b.spread);
    b.seed = get_or(j, "seed", b.seed);
    return b;
}

DataConfig parse_data(const json& j) {
    require_keys(j, "data", {"path", "has_labels", "blobs"});
    DataConfig d;
    if (j.contains("path")) d.path = get_or<std::string>(j, "path", "");
    d.has_labels = get_or(j, "has_labels", d.has_labels);
    if (j.contains("blobs")) d.blobs = parse_blobs(j.at("blobs"));
    if (d.path && d.blobs) {
        throw ConfigError("config: data.path and data.blobs are mutually exclusive");
    }
    return d;
}

MlpSpec parse_model(const json& j) {
    require_keys(j, "model", {"layers", "activation", "seed"});
    MlpSpec m;
    m.layer_sizes = get_or(j, "layers", std::vector<std::size_t>{});
    m.activation = get_or<std::string>(j, "activation", "relu");
    m.seed = get_or<std::uint64_t>(j, "seed", 0);
    return m;
}

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd") return OptimizerKind::SgdMomentum;
    throw ConfigError("config: unknown optimizer '" + name + "' (use adam or sgd)");
}

TrainConfig parse_train(const json& j) {
    require_keys(j, "train",
                 {"objective", "optimizer", "learning_rate", "momentum", "beta1", "beta2",
                  "adam_epsilon", "batch_size", "epochs", "decay_epochs", "decay_factor",
                  "seed", "sigma"});
    TrainConfig t;
    t.objective = parse_objective(get_or<std::string>(j, "objective", "mcl"));
    t.optimizer = parse_optimizer(get_or<std::string>(j, "optimizer", "adam"));
    t.learning_rate = get_or(j, "learning_rate", t.learning_rate);
    t.momentum = get_or(j, "momentum", t.momentum);
    t.beta1 = get_or(j, "beta1", t.beta1);
    t.beta2 = get_or(j, "beta2", t.beta2);
    t.adam_epsilon = get_or(j, "adam_epsilon", t.adam_epsilon);
    t.batch_size = get_or(j, "batch_size", t.batch_size);
    t.epochs = get_or(j, "epochs", t.epochs);
    t.decay_epochs = get_or(j, "decay_epochs", t.decay_epochs);
    t.decay_factor = get_or(j, "decay_factor", t.decay_factor);
    t.seed = get_or<std::uint64_t>(j, "seed", t.seed);
    t.sigma = get_or(j, "sigma", t.sigma);
    return t;
}

SimilarityConfig parse_similarity(const json& j) {
    require_keys(j, "similarity",
                 {"oracle", "augment", "augmentation_scale", "labeled_fraction", "warm_start"});
    SimilarityConfig s;
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        require_keys(o, "similarity.oracle",
                     {"similar_recall", "dissimilar_recall", "similar_precision",
                      "dissimilar_precision", "seed"});
        s.oracle.similar_recall = get_or(o, "similar_recall", 1.0);
        s.oracle.dissimilar_recall = get_or(o, "dissimilar_recall", 1.0);
        if (o.contains("similar_precision")) {
            s.oracle.similar_precision = get_or(o, "similar_precision", 1.0);
        }
        if (o.contains("dissimilar_precision")) {
            s.oracle.dissimilar_precision = get_or(o, "dissimilar_precision", 1.0);
        }
        s.oracle.seed = get_or<std::uint64_t>(o, "seed", 0);
    }
    s.augment = get_or(j, "augment", s.augment);
    s.augmentation_scale = get_or(j, "augmentation_scale", s.augmentation_scale);
    if (j.contains("labeled_fraction")) {
        s.labeled_fraction = get_or(j, "labeled_fraction", 0.0);
    }
    s.warm_start = get_or(j, "warm_start", s.warm_start);
    return s;
}

OutputConfig parse_output(const json& j) {
    require_keys(j, "output", {"dataset", "checkpoint", "metrics", "surface"});
    OutputConfig o;
    o.dataset = get_or<std::string>(j, "dataset", o.dataset);
    o.checkpoint = get_or<std::string>(j, "checkpoint", o.checkpoint);
    o.metrics = get_or<std::string>(j, "metrics", o.metrics);
    o.surface = get_or<std::string>(j, "surface", o.surface);
    return o;
}

EvalConfig parse_eval(const json& j) {
    require_keys(j, "eval", {"checkpoint", "k", "loss", "report_ndc"});
    EvalConfig e;
    if (j.contains("checkpoint")) e.checkpoint = get_or<std::string>(j, "checkpoint", "");
    if (j.contains("k")) e.k = get_or<std::size_t>(j, "k", 0);
    e.loss = parse_objective(get_or<std::string>(j, "loss", "mcl"));
    e.report_ndc = get_or(j, "report_ndc", e.report_ndc);
    return e;
}

GridSpec parse_grid(const json& j) {
    require_keys(j, "landscape.grid", {"alpha_range", "beta_range", "resolution"});
    GridSpec g;
    if (j.contains("alpha_range")) {
        const auto r = get_or(j, "alpha_range", std::vector<double>{-1.0, 1.0});
        if (r.size() != 2) throw ConfigError("config: alpha_range needs [lo, hi]");
        g.alpha_lo = r[0];
        g.alpha_hi = r[1];
    }
    if (j.contains("beta_range")) {
        const auto r = get_or(j, "beta_range", std::vector<double>{-1.0, 1.0});
        if (r.size() != 2) throw ConfigError("config: beta_range needs [lo, hi]");
        g.beta_lo = r[0];
        g.beta_hi = r[1];
    }
    g.resolution = get_or(j, "resolution", g.resolution);
    return g;
}

LandscapeConfig parse_landscape(const json& j) {
    require_keys(j, "landscape",
                 {"projection", "checkpoints", "loss", "grid", "seed", "log_output"});
    LandscapeConfig l;
    l.projection = get_or<std::string>(j, "projection", l.projection);
    if (l.projection != "random" && l.projection != "mutual") {
        throw ConfigError("config: landscape.projection must be 'random' or 'mutual'");
    }
    l.checkpoints = get_or(j, "checkpoints", l.checkpoints);
    l.loss = parse_objective(get_or<std::string>(j, "loss", "mcl"));
    if (j.contains("grid")) l.grid = parse_grid(j.at("grid"));
    l.seed = get_or<std::uint64_t>(j, "seed", l.seed);
    l.log_output = get_or(j, "log_output", l.log_output);
    return l;
}

Paradigm parse_paradigm(const std::string& name) {
    if (name == "supervised") return Paradigm::Supervised;
    if (name == "transfer") return Paradigm::Transfer;
    if (name == "semi") return Paradigm::Semi;
    throw ConfigError("config: unknown paradigm '" + name +
                      "' (use supervised, transfer, or semi)");
}

} // namespace

Objective parse_objective(const std::string& name) {
    if (name == "ce") return Objective::CrossEntropy;
    if (name == "mcl") return Objective::Mcl;
    if (name == "kcl") return Objective::Kcl;
    throw ConfigError("config: unknown objective '" + name + "' (use ce, mcl, or kcl)");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    require_keys(root, "<root>",
                 {"data", "model", "train", "paradigm", "similarity", "output", "eval",
                  "landscape"});
    ExperimentConfig cfg;
    if (root.contains("data")) cfg.data = parse_data(root.at("data"));
    if (root.contains("model")) cfg.model = parse_model(root.at("model"));
    if (root.contains("train")) cfg.train = parse_train(root.at("train"));
    cfg.paradigm = parse_paradigm(get_or<std::string>(root, "paradigm", "supervised"));
    if (root.contains("similarity")) cfg.similarity = parse_similarity(root.at("similarity"));
    if (root.contains("output")) cfg.output = parse_output(root.at("output"));
    if (root.contains("eval")) cfg.eval = parse_eval(root.at("eval"));
    if (root.contains("landscape")) cfg.landscape = parse_landscape(root.at("landscape"));
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

} // namespace pairlearn
