#ifndef TASKENT_CLI_HPP
#define TASKENT_CLI_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taskent/checkpoint.hpp"
#include "taskent/engine.hpp"
#include "taskent/entropy.hpp"
#include "taskent/trainer.hpp"

namespace taskent::cli {

// key = value text, '#' comments, later keys win.  Relative paths inside a
// spec file resolve against the file's directory.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text, const std::string& origin);
KeyValues load_key_value_file(const std::string& path);

// Overlay precedence: flag > TASKENT_<KEY> env var > file > default.
void apply_env_overrides(KeyValues& kv, const std::vector<std::string>& keys);

// FNV-1a over the canonical "key=value\n" serialization (keys sorted).
std::uint64_t config_hash(const KeyValues& kv);
std::string hash_hex(std::uint64_t h);

struct ExperimentSpec {
    std::string task;
    engine::TaskFamily family = engine::TaskFamily::Prediction;
    std::string train_path;
    std::string heldout_path;        // optional
    std::string vocab_path;          // shared vocabulary...
    std::string vocab_x_path;        // ...or split input/output vocabularies
    std::string vocab_y_path;
    bool reverse_input = false;
    bool out_includes_unk = true;
    heads::Scorer scorer = heads::Scorer::DotProduct;
    std::string field;               // prediction over a 2-field corpus: input|output
    std::string pretrained_path;     // optional embedding file
    std::string checkpoint_path;
    std::string trainlog_path;
    std::string dataset_tag;
    train::TrainConfig config;
    std::uint64_t hash = 0;          // over the resolved key set

    bool split_vocab() const { return !vocab_x_path.empty(); }
};

// Resolves a spec from file + env + flag overrides and computes its hash.
ExperimentSpec resolve_spec(const std::string& spec_path, const KeyValues& flag_overrides);

engine::JointVocab load_joint_vocab(const ExperimentSpec& spec);

// Reads a TSV corpus (schema by family/field) and encodes every instance.
std::vector<engine::EncodedInstance> load_dataset(const std::string& corpus_path,
                                                  const ExperimentSpec& spec,
                                                  const engine::JointVocab& vocab);

// ---- command backends; all throw ConfigError/IoError/DivergenceError ----

void cmd_vocab(const std::string& corpus_path, const std::string& field, std::size_t max_size,
               const std::string& out_path);

// Returns the trained model (checkpoint + trainlog CSV written to disk).
Model cmd_train(const std::string& spec_path, const KeyValues& flag_overrides);

entropy::EntropyReport cmd_eval(const std::string& checkpoint_path, const std::string& corpus_path,
                                const std::string& spec_path, const KeyValues& flag_overrides,
                                const std::string& report_path, bool append);

struct BaselineRow {
    int order = 0;
    double bits_per_symbol = 0.0;
    std::size_t symbols = 0;
};
std::vector<BaselineRow> cmd_baseline(const std::string& train_path,
                                      const std::string& heldout_path,
                                      const std::vector<int>& orders, double alpha,
                                      std::uint64_t seed, const std::string& report_path);

// Merges report CSVs, rejects duplicate task names, sorts descending by
// bits/symbol, writes the ranked CSV and returns the rows in rank order.
std::vector<entropy::EntropyReport> cmd_compare(const std::vector<std::string>& report_paths,
                                                const std::string& out_path);

struct SynthSpec {
    std::string kind;        // markov | markov2 | copy | tagging | noisy
    std::size_t symbols = 8;            // K
    std::size_t tags = 4;               // tagging only
    double flip = 0.2;                  // noisy only
    std::string transition;             // markov only: "0.9,0.1;0.1,0.9"
    std::string noise;                  // markov2 only: "0.7,0.2,0.05,0.05"
    std::size_t length = 100000;        // stream kinds
    std::size_t line_length = 100;      // stream kinds: symbols per TSV line
    std::size_t instances = 5000;       // paired kinds
    std::size_t instance_length = 8;    // paired kinds
    std::uint64_t seed = 1;
};

// Writes <out_prefix>.tsv and a <out_prefix>.meta sidecar with the analytic
// entropy rates of the generator.
void cmd_synth(const SynthSpec& spec, const std::string& out_prefix);

// Full synthetic pipeline: sources, vocabularies, training, evaluation,
// baselines and the ranked comparison, all under out_dir.  Fixed seed gives
// byte-identical outputs.
void cmd_run_all(const std::string& out_dir, std::uint64_t seed);

// CSV helpers shared by the commands (deterministic "%.12g" formatting).
std::string format_double(double v);
void write_text_file(const std::string& path, const std::string& content);

void write_report_csv(const entropy::EntropyReport& rep, const std::string& path, bool append);
std::vector<entropy::EntropyReport> read_report_csv(const std::string& path);

}  // namespace taskent::cli

#endif
