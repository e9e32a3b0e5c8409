#include "pairlearn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairlearn/error.hpp"
#include "pairlearn/rng.hpp"

namespace pairlearn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix rows_subset(const Matrix& m, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), m.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = m(idx[r], c);
    }
    return out;
}

// One optimizer update through a freshly recorded graph.
double train_step(Mlp& model, Optimizer& opt, double lr, const Matrix& batch,
                  const std::function<ad::ValuePtr(ad::Tape&, const ad::ValuePtr&)>& build_loss) {
    ad::Tape tape;
    const GraphParams gp = lift_params(tape, model.params());
    const ad::ValuePtr probs = mlp_forward(tape, model.spec(), gp, batch);
    const ad::ValuePtr loss = build_loss(tape, probs);
    tape.backward(loss);
    const ParameterVector grads = collect_gradients(gp, model.params());
    ParameterVector params = model.params();
    opt.step(params, grads, lr);
    model.set_params(std::move(params));
    return loss->scalar();
}

MetricsRow make_row(int epoch, double loss, const EpochEval& eval, const Mlp& model) {
    MetricsRow row{epoch, loss, kNaN, kNaN};
    if (eval) {
        if (const auto metrics = eval(epoch, model)) {
            row.accuracy = metrics->first;
            row.nmi_value = metrics->second;
        }
    }
    return row;
}

// Endless shuffled stream over 0..n-1, reshuffling on exhaustion.
class CyclicSampler {
public:
    explicit CyclicSampler(std::size_t n) : n_(n) {}
    std::size_t next(Rng& rng) {
        if (pos_ == order_.size()) {
            order_ = shuffled_indices(n_, rng);
            pos_ = 0;
        }
        return order_[pos_++];
    }

private:
    std::size_t n_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

} // namespace

const char* objective_name(Objective o) {
    switch (o) {
        case Objective::CrossEntropy: return "ce";
        case Objective::Mcl: return "mcl";
        case Objective::Kcl: return "kcl";
    }
    return "?";
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("TrainConfig: batch size must be >= 1");
    if (objective != Objective::CrossEntropy && batch_size < 2) {
        throw ConfigError("TrainConfig: pairwise objectives need batch size >= 2");
    }
    if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
    if (learning_rate < 0.0) throw ConfigError("TrainConfig: learning rate must be >= 0");
    if (!(decay_factor > 0.0)) throw ConfigError("TrainConfig: decay factor must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("TrainConfig: momentum in [0, 1)");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ConfigError("TrainConfig: Adam betas must lie in [0, 1)");
    }
    if (objective == Objective::Kcl && !(sigma > 0.0)) {
        throw ConfigError("TrainConfig: KCL margin sigma must be positive");
    }
}

OptimizerSettings TrainConfig::optimizer_settings() const {
    OptimizerSettings s;
    s.kind = optimizer;
    s.momentum = momentum;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = adam_epsilon;
    return s;
}

double TrainConfig::learning_rate_at(int epoch) const {
    double lr = learning_rate;
    for (int d : decay_epochs) {
        if (epoch > d) lr *= decay_factor;
    }
    return lr;
}

TrainResult train_supervised_pairwise(Mlp model, const LabeledDataset& data,
                                      const TrainConfig& cfg, const EpochEval& eval) {
    cfg.validate();
    if (data.size() == 0) throw ContractError("train_supervised_pairwise: empty dataset");
    const bool pairwise = cfg.objective != Objective::CrossEntropy;

    Rng rng(cfg.seed);
    Optimizer opt(cfg.optimizer_settings(), model.params().total_len());
    MetricsReport history;
    const std::size_t n = data.size();
    for (int e = 1; e <= cfg.epochs; ++e) {
        const double lr = cfg.learning_rate_at(e);
        const std::vector<std::size_t> perm = shuffled_indices(n, rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, n - start);
            if (pairwise && len < 2) continue;
            const std::span<const std::size_t> idx(perm.data() + start, len);
            const Matrix x = rows_subset(data.features, idx);
            std::vector<int> y;
            y.reserve(len);
            for (std::size_t i : idx) y.push_back(data.labels[i]);
            const double loss =
                train_step(model, opt, lr, x, [&](ad::Tape& t, const ad::ValuePtr& probs) {
                    switch (cfg.objective) {
                        case Objective::CrossEntropy:
                            return cross_entropy_loss(t, probs, y);
                        case Objective::Mcl:
                            return mcl_loss(t, probs,
                                            similarity_from_labels(y, enumerate_pairs(len)));
                        case Objective::Kcl:
                        default:
                            return kcl_loss(t, probs,
                                            similarity_from_labels(y, enumerate_pairs(len)),
                                            cfg.sigma);
                    }
                });
            loss_sum += loss;
            ++batches;
        }
        const double epoch_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : kNaN;
        history.rows.push_back(make_row(e, epoch_loss, eval, model));
    }
    return {std::move(model), std::move(history)};
}

TrainResult train_unsupervised_transfer(Mlp model, const Matrix& features,
                                        SimilaritySource& source, const TrainConfig& cfg,
                                        const EpochEval& eval) {
    cfg.validate();
    if (cfg.objective == Objective::CrossEntropy) {
        throw ConfigError("train_unsupervised_transfer: cross-entropy needs class labels; "
                          "choose a pairwise objective");
    }
    if (features.rows == 0) throw ContractError("train_unsupervised_transfer: empty dataset");

    Rng rng(cfg.seed);
    Optimizer opt(cfg.optimizer_settings(), model.params().total_len());
    MetricsReport history;
    const std::size_t n = features.rows;
    for (int e = 1; e <= cfg.epochs; ++e) {
        const double lr = cfg.learning_rate_at(e);
        const std::vector<std::size_t> perm = shuffled_indices(n, rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, n - start);
            if (len < 2) continue;
            const std::span<const std::size_t> idx(perm.data() + start, len);
            const Matrix x = rows_subset(features, idx);
            const PairIndexList pairs = enumerate_pairs(len);
            const PairwiseLabelSet targets = source.label_pairs(idx, pairs);
            const double loss =
                train_step(model, opt, lr, x, [&](ad::Tape& t, const ad::ValuePtr& probs) {
                    return cfg.objective == Objective::Mcl
                               ? mcl_loss(t, probs, targets)
                               : kcl_loss(t, probs, targets, cfg.sigma);
                });
            loss_sum += loss;
            ++batches;
        }
        const double epoch_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : kNaN;
        history.rows.push_back(make_row(e, epoch_loss, eval, model));
    }
    return {std::move(model), std::move(history)};
}

SslWeights ssl_weights(std::size_t n_labeled, std::size_t n_total_reg) {
    if (n_labeled == 0 || n_total_reg == 0) {
        throw ConfigError("ssl_weights: both sample counts must be positive");
    }
    const double denom = static_cast<double>(n_total_reg + n_labeled);
    SslWeights w;
    w.alpha = static_cast<double>(n_labeled) / denom;
    w.beta = 1.0 - w.alpha; // exact complement; matches the quotient within 1 ulp
    return w;
}

TrainResult train_semi_supervised(Mlp model, const LabeledDataset& labeled,
                                  const UnlabeledDataset& unlabeled, const TrainConfig& cfg,
                                  const SemiOptions& options, const EpochEval& eval) {
    cfg.validate();
    if (labeled.size() == 0) {
        throw ConfigError("train_semi_supervised: the labeled subset is empty");
    }
    if (cfg.batch_size < 2) {
        throw ConfigError("train_semi_supervised: batch size must be >= 2");
    }
    if (labeled.dim() != model.spec().input_dim() ||
        (unlabeled.size() > 0 && unlabeled.features().cols != labeled.dim())) {
        throw ContractError("train_semi_supervised: feature dimensions disagree");
    }

    MetricsReport history;
    Mlp current = std::move(model);
    int epoch_offset = 0;
    if (options.warm_start) {
        TrainConfig warm = cfg;
        warm.objective = Objective::CrossEntropy;
        TrainResult w = train_supervised_pairwise(std::move(current), labeled, warm, eval);
        current = std::move(w.model);
        history.rows = std::move(w.history.rows);
        epoch_offset = cfg.epochs;
    }

    const SslWeights weights = ssl_weights(labeled.size(), labeled.size() + unlabeled.size());
    const std::size_t n_total = labeled.size() + unlabeled.size();
    const std::size_t batch = std::min(cfg.batch_size, n_total);
    std::size_t n_lab_per_batch;
    if (unlabeled.size() == 0) {
        n_lab_per_batch = batch;
    } else {
        const double share =
            static_cast<double>(batch) * static_cast<double>(labeled.size()) /
            static_cast<double>(n_total);
        n_lab_per_batch = static_cast<std::size_t>(std::llround(share));
        n_lab_per_batch = std::clamp<std::size_t>(n_lab_per_batch, 1, batch - 1);
    }
    const std::size_t n_unlab_per_batch = batch - n_lab_per_batch;
    const std::size_t steps_per_epoch = (n_total + batch - 1) / batch;

    Rng rng(cfg.seed);
    Optimizer opt(cfg.optimizer_settings(), current.params().total_len());
    CyclicSampler lab_stream(labeled.size());
    CyclicSampler unlab_stream(unlabeled.size() > 0 ? unlabeled.size() : 1);

    for (int e = 1; e <= cfg.epochs; ++e) {
        const double lr = cfg.learning_rate_at(e);
        double loss_sum = 0.0;
        for (std::size_t step = 0; step < steps_per_epoch; ++step) {
            Matrix x_orig(batch, labeled.dim());
            std::vector<int> y_lab(n_lab_per_batch);
            for (std::size_t r = 0; r < n_lab_per_batch; ++r) {
                const std::size_t src = lab_stream.next(rng);
                for (std::size_t c = 0; c < labeled.dim(); ++c) {
                    x_orig(r, c) = labeled.features(src, c);
                }
                y_lab[r] = labeled.labels[src];
            }
            for (std::size_t r = 0; r < n_unlab_per_batch; ++r) {
                const std::size_t src = unlab_stream.next(rng);
                for (std::size_t c = 0; c < labeled.dim(); ++c) {
                    x_orig(n_lab_per_batch + r, c) = unlabeled.features()(src, c);
                }
            }

            Matrix x_full;
            PairwiseLabelSet aug_set;
            if (options.augment) {
                AugmentedBatch aug =
                    augmentation_pairs(x_orig, options.augmentation_scale, rng.next_u64());
                x_full = std::move(aug.features);
                aug_set = std::move(aug.pair_labels);
            } else {
                x_full = std::move(x_orig);
            }
            const std::size_t b_full = x_full.rows;
            const PairIndexList pairs = enumerate_pairs(b_full);

            auto is_labeled_row = [&](std::size_t r) {
                return r < n_lab_per_batch ||
                       (options.augment && r >= batch && r < batch + n_lab_per_batch);
            };
            auto label_of_row = [&](std::size_t r) {
                return r < n_lab_per_batch ? y_lab[r] : y_lab[r - batch];
            };
            std::vector<std::size_t> labeled_rows;
            std::vector<int> labeled_row_labels;
            for (std::size_t r = 0; r < b_full; ++r) {
                if (is_labeled_row(r)) {
                    labeled_rows.push_back(r);
                    labeled_row_labels.push_back(label_of_row(r));
                }
            }

            ad::Tape tape;
            const GraphParams gp = lift_params(tape, current.params());
            const ad::ValuePtr probs = mlp_forward(tape, current.spec(), gp, x_full);

            // Pseudo targets come from the current forward values only; no
            // gradient flows through them.
            PairwiseLabelSet targets =
                pseudo_similarity(predict_similarities(probs->matrix(), pairs));
            if (options.augment) targets = combine_or(targets, aug_set);
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto& [i, j] = pairs[p];
                if (is_labeled_row(i) && is_labeled_row(j)) {
                    targets.values[p] = label_of_row(i) == label_of_row(j) ? 1.0 : 0.0;
                    targets.defined[p] = 1;
                }
            }

            const ad::ValuePtr mcl = mcl_loss(tape, probs, targets);
            const ad::ValuePtr ce = cross_entropy_loss(
                tape, tape.gather_rows(probs, labeled_rows), labeled_row_labels);
            const ad::ValuePtr total =
                tape.add(tape.scale(ce, weights.alpha), tape.scale(mcl, weights.beta));
            tape.backward(total);
            const ParameterVector grads = collect_gradients(gp, current.params());
            ParameterVector params = current.params();
            opt.step(params, grads, lr);
            current.set_params(std::move(params));
            loss_sum += total->scalar();
        }
        const double epoch_loss = loss_sum / static_cast<double>(steps_per_epoch);
        history.rows.push_back(make_row(epoch_offset + e, epoch_loss, eval, current));
    }
    return {std::move(current), std::move(history)};
}

} // namespace pairlearn
