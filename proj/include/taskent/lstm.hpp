#ifndef TASKENT_LSTM_HPP
#define TASKENT_LSTM_HPP

#include <vector>

#include "taskent/engine.hpp"
#include "taskent/numerics.hpp"

namespace taskent::lstm {

using num::Matrix;
using num::Vec;

// Single hidden layer, no bias terms.  Per step, with x the embedding of the
// current token and e the previous output representation:
//   i = sigmoid(W_i x + V_i e)     input gate
//   f = sigmoid(W_f x + V_f e)     forget gate
//   o = sigmoid(W_o x + V_o e)     output gate
//   l = tanh(W_l x + V_l e)        candidate
//   m = f . m_prev + i . l         memory (elementwise products)
//   e = o . m                      output representation
struct LstmParameters {
    Matrix w_i, v_i, w_f, v_f, w_o, v_o, w_l, v_l;  // W_*: hidden x embed, V_*: hidden x hidden
    Matrix embedding;                               // vocab x embed, one row per symbol id

    std::size_t hidden_dim() const { return w_i.rows; }
    std::size_t embed_dim() const { return w_i.cols; }
    std::size_t vocab_size() const { return embedding.rows; }

    static LstmParameters zeros(std::size_t hidden, std::size_t embed, std::size_t vocab);
    Vec embedding_row(int id) const;
};

struct LstmState {
    Vec e;  // output representation
    Vec m;  // memory
};

// One unrolled step with the activations BPTT needs.
struct StepTrace {
    Vec i, f, o, l;
    Vec m, e;
    int token = -1;
};

LstmState lstm_step(const LstmParameters& p, int token, const LstmState& prev);

// states[t] from states[t-1], starting at all-zeros.  The trace keeps gate
// activations so backward() is exact without recomputation.
std::vector<StepTrace> forward(const LstmParameters& p, const engine::EncodedInstance& inst);

// Accumulators shaped like the parameters, plus the head projection if any.
struct Gradients {
    Matrix w_i, v_i, w_f, v_f, w_o, v_o, w_l, v_l;
    Matrix embedding;
    Matrix head_w;  // L x 3K, empty for dot-product heads
    Vec head_u;     // L

    static Gradients zeros_like(const LstmParameters& p, std::size_t head_rows,
                                std::size_t head_cols);
    void zero();
    double squared_norm() const;
    void scale(double s);
    void add(const Gradients& other);
};

// Exact backpropagation through time.  state_grads[t] is dLoss/d e_t as
// seeded by the scoring heads (zero where nothing attaches); gradients for
// every parameter tensor and every used embedding row accumulate into g.
void backward(const LstmParameters& p, const engine::EncodedInstance& inst,
              const std::vector<StepTrace>& trace, const std::vector<Vec>& state_grads,
              Gradients& g);

}  // namespace taskent::lstm

#endif
