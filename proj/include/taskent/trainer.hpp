#ifndef TASKENT_TRAINER_HPP
#define TASKENT_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taskent/checkpoint.hpp"
#include "taskent/engine.hpp"
#include "taskent/heads.hpp"
#include "taskent/lstm.hpp"

namespace taskent::train {

struct TrainConfig {
    double initial_lr = 0.5;
    std::size_t epochs = 4;
    std::size_t batch_size = 32;
    double clip_threshold = 5.0;
    double init_range = 0.1;
    std::uint64_t seed = 1;
    std::size_t hidden_dim = 64;
    std::size_t embed_dim = 64;
    std::size_t aligned_rows = 0;  // L of the aligned projection; 0 means L = hidden_dim

    void validate() const;
};

struct EpochLog {
    std::size_t epoch = 0;
    double lr = 0.0;
    double train_bits_per_symbol = 0.0;
    double heldout_bits_per_symbol = 0.0;  // NaN when no held-out set given
    double wall_seconds = 0.0;             // informational; never serialized
};

using TrainLog = std::vector<EpochLog>;

// Sentence-per-line pretrained vectors: symbol then embed_dim reals.
// Returns rows by symbol; dimension mismatches are rejected.
struct PretrainedEmbeddings {
    std::vector<std::pair<std::string, num::Vec>> rows;
};
PretrainedEmbeddings load_pretrained(const std::string& path, std::size_t embed_dim);

// Every tensor element iid uniform [-init_range, init_range] from the seeded
// generator, filled in a fixed documented order (w_i v_i w_f v_f w_o v_o
// w_l v_l embedding head_w head_u).  Rows for symbols found in `pretrained`
// are then overwritten.
Model init_parameters(const TrainConfig& cfg, const engine::JointVocab& vocab,
                      engine::TaskFamily family, heads::Scorer scorer, int out_lo, int out_hi,
                      const PretrainedEmbeddings* pretrained = nullptr);

// Global-norm clipping: if ||g||_2 > threshold, scale by threshold/||g||_2.
void clip_gradients(lstm::Gradients& g, double threshold);

// lr_e = initial_lr * (1 - e/E): linear decay, never zero mid-training.
double lr_schedule(const TrainConfig& cfg, std::size_t epoch);

// Forward + heads + BPTT for one instance; returns the NLL in bits and
// accumulates all gradients (natural-log scale) into g.
double instance_backward(const Model& m, const engine::EncodedInstance& inst, lstm::Gradients& g);

// Mini-batch SGD without momentum: per epoch, shuffle with the run seed,
// sum instance gradients per batch in order, clip, apply theta -= lr * g.
// NaN/Inf loss aborts with the epoch and batch identified.
TrainLog train(const TrainConfig& cfg, const std::vector<engine::EncodedInstance>& dataset,
               Model& model,
               const std::vector<engine::EncodedInstance>* heldout = nullptr);

}  // namespace taskent::train

#endif
