#ifndef TASKENT_HEADS_HPP
#define TASKENT_HEADS_HPP

#include <string>
#include <vector>

#include "taskent/engine.hpp"
#include "taskent/lstm.hpp"
#include "taskent/numerics.hpp"

namespace taskent::heads {

using num::Matrix;
using num::Vec;

// Scorer between the running state and an output candidate.  DotProduct is
// exp(e_prev . e_y) over the candidate range; the aligned scorers add the
// aligned input embedding and project the concatenation [e_prev, e_y, e_x]
// through W (L x 3K) then U (L) to a scalar logit.
//
// AlignedLinear applies W then U with no nonlinearity.  Under a softmax the
// e_prev and e_x contributions are then candidate-independent and cancel, so
// the distribution cannot condition on the input; it is kept for reference.
// AlignedTanh inserts tanh between W and U, which restores the conditioning
// and is the default for aligned tasks.
enum class Scorer { DotProduct, AlignedLinear, AlignedTanh };

std::string scorer_name(Scorer s);
Scorer parse_scorer(const std::string& name);

struct HeadParameters {
    int out_lo = 0;  // candidate ids are [out_lo, out_hi) in the joint vocabulary
    int out_hi = 0;
    Scorer scorer = Scorer::DotProduct;
    Matrix w;  // L x 3K (aligned scorers only)
    Vec u;     // L

    int candidates() const { return out_hi - out_lo; }
};

struct StepDistribution {
    std::vector<double> probs;  // over [out_lo, out_hi), strictly positive, sums to 1
    int out_lo = 0;

    double prob_of(int id) const { return probs[static_cast<std::size_t>(id - out_lo)]; }
    double log_prob_of(int id) const;
};

// Eq.-level heads.  The embedding table supplies the candidate vectors e_y.
StepDistribution predict_next_prob(const Vec& e_prev, const Matrix& embedding,
                                   const HeadParameters& head);
StepDistribution single_label_prob(const Vec& e_n, const Matrix& embedding,
                                   const HeadParameters& head);
StepDistribution aligned_prob(const Vec& e_prev, const Vec& e_x, const Matrix& embedding,
                              const HeadParameters& head);

// One distribution per masked position; logits at position t come from the
// state at t-1 (the zero state when t = 0) plus, for aligned instances, the
// embedding of the aligned input token.
std::vector<StepDistribution> instance_distributions(const std::vector<lstm::StepTrace>& trace,
                                                     const engine::EncodedInstance& inst,
                                                     const Matrix& embedding,
                                                     const HeadParameters& head);

struct NllResult {
    double bits = 0.0;                 // total negative log2-likelihood
    std::vector<Vec> logit_grads;      // per position: dNLL_nats/dlogit = softmax - onehot
};

// realized[k] is the symbol id at the k-th masked position.
NllResult nll_and_gradient_seed(const std::vector<StepDistribution>& dists,
                                const std::vector<int>& realized);

// Backpropagates the logit gradients through the head into (a) per-sequence-
// position state seeds dLoss/d e_t and (b) embedding/W/U accumulators in g.
std::vector<Vec> backward_heads(const std::vector<lstm::StepTrace>& trace,
                                const engine::EncodedInstance& inst, const Matrix& embedding,
                                const HeadParameters& head,
                                const std::vector<StepDistribution>& dists,
                                const std::vector<Vec>& logit_grads, lstm::Gradients& g);

}  // namespace taskent::heads

#endif
