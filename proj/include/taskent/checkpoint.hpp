#ifndef TASKENT_CHECKPOINT_HPP
#define TASKENT_CHECKPOINT_HPP

#include <cstdint>
#include <string>

#include "taskent/engine.hpp"
#include "taskent/heads.hpp"
#include "taskent/lstm.hpp"

namespace taskent {

// Everything a trained predictor carries.
struct Model {
    lstm::LstmParameters params;
    heads::HeadParameters head;
    engine::TaskFamily family = engine::TaskFamily::Prediction;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

// Binary checkpoint, little-endian throughout:
//   magic "TENT", u32 version,
//   u32 hidden_dim, u32 embed_dim, u64 vocab_size,
//   u32 family, u32 scorer, i64 out_lo, i64 out_hi, u64 head_rows,
//   u64 config_hash, u64 seed,
// then each tensor as u64 element count followed by that many f64, in the
// order: w_i v_i w_f v_f w_o v_o w_l v_l embedding [head_w head_u].
void save_checkpoint(const Model& m, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace taskent

#endif
