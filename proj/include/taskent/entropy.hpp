#ifndef TASKENT_ENTROPY_HPP
#define TASKENT_ENTROPY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "taskent/corpus.hpp"
#include "taskent/engine.hpp"
#include "taskent/heads.hpp"
#include "taskent/lstm.hpp"
#include "taskent/numerics.hpp"

namespace taskent::entropy {

// Probabilities over a finite outcome set; must sum to 1 within 1e-10.
using DiscreteDistribution = std::vector<double>;

void check_distribution(const DiscreteDistribution& d);

// -sum p log2 p with the 0 log 0 = 0 convention.  Bits.
double shannon_entropy(const DiscreteDistribution& d);

// -sum p log2 q.  Requires q > 0 wherever p > 0.
double cross_entropy(const DiscreteDistribution& p, const DiscreteDistribution& q);

// sum p log2(p/q), >= 0, zero iff p = q.  Rejects absolute-continuity
// violations (which would be an infinite divergence) explicitly.
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Joint probabilities over pairs (x, y); rows index x.
struct JointTable {
    num::Matrix p;
};

// H(Y|X) = H(X,Y) - H(X).  Bits.
double conditional_entropy(const JointTable& j);
double marginal_entropy_y(const JointTable& j);

// n-order Markov predictor with additive smoothing:
//   p(y | ctx) = (count(ctx, y) + alpha) / (count(ctx) + alpha * V)
// Positions with fewer than n symbols of history score as uniform 1/V and
// are counted in the average.
class NgramModel {
  public:
    NgramModel(int order, double alpha, int vocab_size);

    void fit(const corpus::TokenStream& stream);
    double conditional_prob(const std::vector<int>& context, int symbol) const;

    int order() const { return order_; }
    double alpha() const { return alpha_; }
    int vocab_size() const { return vocab_size_; }

  private:
    int order_;
    double alpha_;
    int vocab_size_;
    std::map<std::vector<int>, std::map<int, std::size_t>> counts_;
    std::map<std::vector<int>, std::size_t> totals_;
};

NgramModel fit_ngram(const corpus::TokenStream& stream, int order, double alpha, int vocab_size);

// F_n: -(1/N) sum log2 p(y_t | previous n symbols) over the held-out stream.
double ngram_cross_entropy(const NgramModel& model, const corpus::TokenStream& heldout);

struct EntropyReport {
    std::string task;
    std::string family;
    std::string dataset;
    std::size_t symbols = 0;
    double bits_per_symbol = 0.0;
    std::vector<double> per_instance_bits;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

// Average -(log2 P) over all masked positions of the dataset (micro-average:
// total bits over total masked symbols).
EntropyReport model_cross_entropy(const lstm::LstmParameters& params,
                                  const heads::HeadParameters& head,
                                  const std::vector<engine::EncodedInstance>& dataset);

}  // namespace taskent::entropy

#endif
