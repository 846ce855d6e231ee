#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "taskent/cli.hpp"
#include "taskent/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDivergence = 4;

struct TrainingFlags {
    std::string seed, epochs, lr, batch, clip, hidden_dim, embed_dim, reverse_input, field, task;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the run seed");
        cmd->add_option("--epochs", epochs, "override the epoch count");
        cmd->add_option("--lr", lr, "override the initial learning rate");
        cmd->add_option("--batch", batch, "override the mini-batch size");
        cmd->add_option("--clip", clip, "override the gradient clip threshold");
        cmd->add_option("--hidden-dim", hidden_dim, "override the hidden dimension");
        cmd->add_option("--embed-dim", embed_dim, "override the embedding dimension");
        cmd->add_option("--reverse-input", reverse_input, "override input reversal (true|false)");
        cmd->add_option("--field", field, "prediction tasks: read this field (input|output)");
        cmd->add_option("--task", task, "override the task name");
    }

    taskent::cli::KeyValues overrides() const {
        taskent::cli::KeyValues kv;
        auto put = [&kv](const std::string& key, const std::string& v) {
            if (!v.empty()) kv[key] = v;
        };
        put("seed", seed);
        put("epochs", epochs);
        put("lr", lr);
        put("batch", batch);
        put("clip", clip);
        put("hidden_dim", hidden_dim);
        put("embed_dim", embed_dim);
        put("reverse_input", reverse_input);
        put("field", field);
        put("task", task);
        return kv;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taskent: cross-entropy measurement for sequence tasks"};
    app.require_subcommand(1);

    // vocab
    auto* vocab = app.add_subcommand("vocab", "build a vocabulary file from a corpus");
    std::string v_corpus, v_out, v_field = "all";
    std::size_t v_max = 200000;
    vocab->add_option("--corpus", v_corpus, "corpus TSV")->required();
    vocab->add_option("--out", v_out, "output vocabulary file")->required();
    vocab->add_option("--max-size", v_max, "largest content vocabulary to keep");
    vocab->add_option("--field", v_field, "all|input|output");

    // train
    auto* train = app.add_subcommand("train", "train a model from an experiment spec");
    std::string t_spec;
    TrainingFlags t_flags;
    train->add_option("--spec", t_spec, "experiment spec file")->required();
    t_flags.attach(train);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a held-out corpus");
    std::string e_ckpt, e_corpus, e_spec, e_out;
    bool e_append = false;
    TrainingFlags e_flags;
    eval->add_option("--checkpoint", e_ckpt, "checkpoint file")->required();
    eval->add_option("--corpus", e_corpus, "held-out corpus TSV")->required();
    eval->add_option("--spec", e_spec, "experiment spec (vocabulary + family)")->required();
    eval->add_option("--out", e_out, "report CSV path")->required();
    eval->add_flag("--append", e_append, "append to an existing report");
    e_flags.attach(eval);

    // baseline
    auto* baseline = app.add_subcommand("baseline", "n-gram cross-entropy bounds F_n");
    std::string b_train, b_heldout, b_out;
    std::vector<int> b_orders{1, 2, 3};
    double b_alpha = 1.0;
    std::uint64_t b_seed = 1;
    baseline->add_option("--corpus", b_train, "training stream TSV (single field)")->required();
    baseline->add_option("--heldout", b_heldout, "held-out stream TSV")->required();
    baseline->add_option("--orders", b_orders, "context lengths, e.g. --orders 1 2 3");
    baseline->add_option("--alpha", b_alpha, "additive smoothing constant");
    baseline->add_option("--seed", b_seed, "seed recorded in the report");
    baseline->add_option("--out", b_out, "report CSV path");

    // compare
    auto* compare = app.add_subcommand("compare", "rank entropy reports");
    std::vector<std::string> c_reports;
    std::string c_out;
    compare->add_option("--reports", c_reports, "entropy report CSVs")->required();
    compare->add_option("--out", c_out, "ranked CSV path");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with known entropy");
    taskent::cli::SynthSpec s_spec;
    std::string s_out;
    synth->add_option("--kind", s_spec.kind, "markov|markov2|copy|tagging|noisy")->required();
    synth->add_option("--out-prefix", s_out, "output prefix (.tsv and .meta)")->required();
    synth->add_option("--symbols", s_spec.symbols, "alphabet size K");
    synth->add_option("--tags", s_spec.tags, "tag count (tagging)");
    synth->add_option("--flip", s_spec.flip, "corruption probability (noisy)");
    synth->add_option("--transition", s_spec.transition, "rows 'a,b;c,d' (markov)");
    synth->add_option("--noise", s_spec.noise, "weights 'w0,w1,...' (markov2)");
    synth->add_option("--length", s_spec.length, "stream length (markov kinds)");
    synth->add_option("--line-length", s_spec.line_length, "symbols per line (markov kinds)");
    synth->add_option("--instances", s_spec.instances, "instance count (paired kinds)");
    synth->add_option("--instance-length", s_spec.instance_length, "tokens per instance");
    synth->add_option("--seed", s_spec.seed, "generator seed");

    // run-all
    auto* runall = app.add_subcommand("run-all", "full synthetic pipeline in one command");
    std::string r_dir;
    std::uint64_t r_seed = 1;
    runall->add_option("--out-dir", r_dir, "output directory")->required();
    runall->add_option("--seed", r_seed, "run seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*vocab) {
            taskent::cli::cmd_vocab(v_corpus, v_field, v_max, v_out);
        } else if (*train) {
            taskent::cli::cmd_train(t_spec, t_flags.overrides());
        } else if (*eval) {
            taskent::cli::cmd_eval(e_ckpt, e_corpus, e_spec, e_flags.overrides(), e_out, e_append);
        } else if (*baseline) {
            taskent::cli::cmd_baseline(b_train, b_heldout, b_orders, b_alpha, b_seed, b_out);
        } else if (*compare) {
            taskent::cli::cmd_compare(c_reports, c_out);
        } else if (*synth) {
            taskent::cli::cmd_synth(s_spec, s_out);
        } else if (*runall) {
            taskent::cli::cmd_run_all(r_dir, r_seed);
        }
    } catch (const taskent::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const taskent::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const taskent::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
