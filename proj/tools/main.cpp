// Command-line front end: gen-data, train, eval, landscape.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pairlearn/commands.hpp"
#include "pairlearn/error.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory for relative paths");
    cmd->add_option("--seed", args.seed, "override the command's operative seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

pairlearn::CommandContext make_context(const CommonArgs& args) {
    pairlearn::CommandContext ctx;
    ctx.out_dir = args.out_dir;
    if (args.seed_set) ctx.seed_override = args.seed;
    return ctx;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise-similarity classifier training and analysis"};
    app.require_subcommand(1);

    CommonArgs gen_args, train_args, eval_args, landscape_args;
    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
    add_common(gen, gen_args);
    CLI::App* train = app.add_subcommand("train", "train under the configured paradigm");
    add_common(train, train_args);
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    add_common(eval, eval_args);
    CLI::App* landscape = app.add_subcommand("landscape", "export a loss surface CSV");
    add_common(landscape, landscape_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            pairlearn::cmd_gen_data(pairlearn::ExperimentConfig::load(gen_args.config_path),
                                    make_context(gen_args));
        } else if (train->parsed()) {
            pairlearn::cmd_train(pairlearn::ExperimentConfig::load(train_args.config_path),
                                 make_context(train_args));
        } else if (eval->parsed()) {
            pairlearn::cmd_eval(pairlearn::ExperimentConfig::load(eval_args.config_path),
                                make_context(eval_args));
        } else if (landscape->parsed()) {
            pairlearn::cmd_landscape(
                pairlearn::ExperimentConfig::load(landscape_args.config_path),
                make_context(landscape_args));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
