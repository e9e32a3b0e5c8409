#include "pairlearn/commands.hpp"

#include <cmath>
#include <cstdio>

#include "pairlearn/csv_io.hpp"
#include "pairlearn/dataset.hpp"
#include "pairlearn/error.hpp"
#include "pairlearn/evaluation.hpp"
#include "pairlearn/rng.hpp"

namespace pairlearn {

namespace {

LabeledDataset load_labeled_data(const ExperimentConfig& cfg) {
    if (cfg.data.blobs) {
        const BlobParams& b = *cfg.data.blobs;
        return generate_blobs(b.classes, b.per_class, b.dim, b.separation, b.spread, b.seed);
    }
    if (cfg.data.path) {
        if (!cfg.data.has_labels) {
            throw ConfigError("this command needs class labels; set data.has_labels");
        }
        return load_labeled_csv(*cfg.data.path);
    }
    throw ConfigError("config: provide data.path or data.blobs");
}

EpochEval make_eval(const Matrix& features, const std::vector<int>& labels, int num_classes) {
    return [&features, &labels, num_classes](int, const Mlp& model)
               -> std::optional<std::pair<double, double>> {
        const Matrix probs = model.predict(features);
        const EvalResult r =
            evaluate_predictions(probs, labels, static_cast<std::size_t>(num_classes));
        return std::make_pair(r.accuracy, r.nmi_value);
    };
}

void print_cluster_sizes(const std::vector<long long>& sizes) {
    std::string line = "cluster_sizes=";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0) line += ',';
        line += std::to_string(sizes[i]);
    }
    std::printf("%s\n", line.c_str());
}

} // namespace

std::string resolve_output_path(const CommandContext& ctx, const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    if (ctx.out_dir.empty() || ctx.out_dir == ".") return path;
    return ctx.out_dir + "/" + path;
}

void cmd_gen_data(const ExperimentConfig& cfg, const CommandContext& ctx) {
    if (!cfg.data.blobs) throw ConfigError("gen-data: config needs data.blobs parameters");
    BlobParams b = *cfg.data.blobs;
    if (ctx.seed_override) b.seed = *ctx.seed_override;
    if (cfg.output.dataset.empty()) throw ConfigError("gen-data: output.dataset path missing");
    const LabeledDataset ds =
        generate_blobs(b.classes, b.per_class, b.dim, b.separation, b.spread, b.seed);
    save_dataset_csv(ds, resolve_output_path(ctx, cfg.output.dataset));
    std::printf("N=%zu d=%zu C=%d\n", ds.size(), ds.dim(), ds.num_classes);
}

void cmd_train(const ExperimentConfig& cfg, const CommandContext& ctx) {
    TrainConfig train = cfg.train;
    if (ctx.seed_override) train.seed = *ctx.seed_override;
    Mlp model = Mlp::build(cfg.model);

    TrainResult result{std::move(model), {}};
    const LabeledDataset data = load_labeled_data(cfg);
    if (data.dim() != cfg.model.input_dim()) {
        throw ConfigError("train: dataset dimension does not match model input layer");
    }

    bool print_ndc = false;
    switch (cfg.paradigm) {
        case Paradigm::Supervised: {
            result = train_supervised_pairwise(
                std::move(result.model), data, train,
                make_eval(data.features, data.labels, data.num_classes));
            break;
        }
        case Paradigm::Transfer: {
            const UnlabeledDataset unlabeled = UnlabeledDataset::hide_labels(data);
            OracleSimilaritySource source(unlabeled.hidden_labels_for_eval(),
                                          cfg.similarity.oracle);
            result = train_unsupervised_transfer(
                std::move(result.model), unlabeled.features(), source, train,
                make_eval(unlabeled.features(), unlabeled.hidden_labels_for_eval(),
                          unlabeled.hidden_class_count()));
            print_ndc = true;
            break;
        }
        case Paradigm::Semi: {
            if (!cfg.similarity.labeled_fraction) {
                throw ConfigError("train: the semi paradigm needs similarity.labeled_fraction");
            }
            const double fraction = *cfg.similarity.labeled_fraction;
            if (!(fraction > 0.0) || fraction > 1.0) {
                throw ConfigError("train: labeled_fraction must lie in (0, 1]");
            }
            const std::size_t n_labeled = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size()))));
            // The labeled subset: head of a seeded shuffle of the dataset.
            Rng split_rng(train.seed);
            const std::vector<std::size_t> order = shuffled_indices(data.size(), split_rng);
            LabeledDataset shuffled;
            shuffled.num_classes = data.num_classes;
            shuffled.features = Matrix(data.size(), data.dim());
            shuffled.labels.resize(data.size());
            for (std::size_t r = 0; r < data.size(); ++r) {
                for (std::size_t c = 0; c < data.dim(); ++c) {
                    shuffled.features(r, c) = data.features(order[r], c);
                }
                shuffled.labels[r] = data.labels[order[r]];
            }
            auto [labeled, rest] = split_head(shuffled, n_labeled);
            const UnlabeledDataset unlabeled = UnlabeledDataset::hide_labels(std::move(rest));
            SemiOptions options;
            options.augment = cfg.similarity.augment;
            options.augmentation_scale = cfg.similarity.augmentation_scale;
            options.warm_start = cfg.similarity.warm_start;
            result = train_semi_supervised(
                std::move(result.model), labeled, unlabeled, train, options,
                make_eval(data.features, data.labels, data.num_classes));
            break;
        }
    }

    result.model.save_checkpoint(resolve_output_path(ctx, cfg.output.checkpoint));
    write_metrics_csv(result.history, resolve_output_path(ctx, cfg.output.metrics));

    const Matrix probs = result.model.predict(data.features);
    const EvalResult ev =
        evaluate_predictions(probs, data.labels, static_cast<std::size_t>(data.num_classes));
    if (print_ndc || cfg.eval.report_ndc) {
        std::printf("final: accuracy=%.6f nmi=%.6f ndc=%d\n", ev.accuracy, ev.nmi_value,
                    ev.ndc_value);
    } else {
        std::printf("final: accuracy=%.6f nmi=%.6f\n", ev.accuracy, ev.nmi_value);
    }
}

void cmd_eval(const ExperimentConfig& cfg, const CommandContext& ctx) {
    if (!cfg.eval.checkpoint) throw ConfigError("eval: config needs eval.checkpoint");
    const Mlp model = Mlp::load_checkpoint(resolve_output_path(ctx, *cfg.eval.checkpoint));
    if (cfg.eval.k && *cfg.eval.k != model.spec().output_nodes()) {
        throw ContractError("eval: requested K does not match the checkpoint");
    }
    const LabeledDataset data = load_labeled_data(cfg);
    if (data.dim() != model.spec().input_dim()) {
        throw ContractError("eval: dataset dimension does not match the checkpoint");
    }
    const Matrix probs = model.predict(data.features);
    const EvalResult ev =
        evaluate_predictions(probs, data.labels, static_cast<std::size_t>(data.num_classes));
    const double loss = dataset_loss(model.spec(), model.params(), data.features, data.labels,
                                     cfg.eval.loss, cfg.train.sigma);
    std::printf("loss=%.17g\n", loss);
    if (cfg.eval.report_ndc) {
        std::printf("accuracy=%.6f nmi=%.6f ndc=%d\n", ev.accuracy, ev.nmi_value, ev.ndc_value);
    } else {
        std::printf("accuracy=%.6f nmi=%.6f\n", ev.accuracy, ev.nmi_value);
    }
    print_cluster_sizes(ev.cluster_sizes);
}

void cmd_landscape(const ExperimentConfig& cfg, const CommandContext& ctx) {
    const LandscapeConfig& l = cfg.landscape;
    LabeledDataset data = load_labeled_data(cfg);

    std::uint64_t seed = l.seed;
    if (ctx.seed_override) seed = *ctx.seed_override;

    ParameterVector theta, delta, eta;
    MlpSpec spec;
    if (l.projection == "random") {
        if (l.checkpoints.size() != 1) {
            throw ConfigError("landscape: random projection needs exactly one checkpoint");
        }
        const Mlp origin = Mlp::load_checkpoint(resolve_output_path(ctx, l.checkpoints[0]));
        spec = origin.spec();
        theta = origin.params();
        std::tie(delta, eta) = random_directions(theta, seed);
    } else {
        if (l.checkpoints.size() != 3) {
            throw ConfigError("landscape: mutual projection needs exactly three checkpoints "
                              "(origin, then the two others)");
        }
        const Mlp origin = Mlp::load_checkpoint(resolve_output_path(ctx, l.checkpoints[0]));
        const Mlp other1 = Mlp::load_checkpoint(resolve_output_path(ctx, l.checkpoints[1]));
        const Mlp other2 = Mlp::load_checkpoint(resolve_output_path(ctx, l.checkpoints[2]));
        spec = origin.spec();
        theta = origin.params();
        std::tie(delta, eta) = mutual_directions(theta, other1.params(), other2.params());
    }
    if (data.dim() != spec.input_dim()) {
        throw ContractError("landscape: dataset dimension does not match the checkpoint");
    }

    SurfaceResult surface = evaluate_surface(spec, theta, delta, eta, l.grid, l.loss,
                                             data.features, data.labels, cfg.train.sigma);
    surface.projection = l.projection;
    surface.seed = seed;
    const std::string path = resolve_output_path(ctx, cfg.output.surface);
    write_surface_csv(surface, path, l.log_output);
    std::printf("surface=%s resolution=%d loss=%s projection=%s\n", path.c_str(),
                l.grid.resolution, surface.loss_name.c_str(), surface.projection.c_str());
}

} // namespace pairlearn
