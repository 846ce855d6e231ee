#include "taskent/entropy.hpp"

#include <cmath>

#include "taskent/errors.hpp"

namespace taskent::entropy {

void check_distribution(const DiscreteDistribution& d) {
    if (d.empty()) throw ConfigError("distribution: empty outcome set");
    double s = 0.0;
    for (double p : d) {
        if (p < 0.0 || !std::isfinite(p))
            throw ConfigError("distribution: invalid probability " + std::to_string(p));
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-10)
        throw ConfigError("distribution: sums to " + std::to_string(s) + ", expected 1");
}

double shannon_entropy(const DiscreteDistribution& d) {
    check_distribution(d);
    double h = 0.0;
    for (double p : d)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double cross_entropy(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    check_distribution(p);
    check_distribution(q);
    if (p.size() != q.size())
        throw ConfigError("cross_entropy: outcome sets differ (" + std::to_string(p.size()) +
                          " vs " + std::to_string(q.size()) + ")");
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0)
                throw ConfigError("cross_entropy: model assigns zero mass to outcome " +
                                  std::to_string(i) + " (infinite)");
            h -= p[i] * std::log2(q[i]);
        }
    }
    return h;
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    check_distribution(p);
    check_distribution(q);
    if (p.size() != q.size())
        throw ConfigError("kl_divergence: outcome sets differ (" + std::to_string(p.size()) +
                          " vs " + std::to_string(q.size()) + ")");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0)
                throw ConfigError("kl_divergence: absolute continuity violated at outcome " +
                                  std::to_string(i) + " (infinite divergence)");
            d += p[i] * std::log2(p[i] / q[i]);
        }
    }
    return d;
}

namespace {

void check_joint(const JointTable& j) {
    if (j.p.rows == 0 || j.p.cols == 0) throw ConfigError("joint table: empty");
    double s = 0.0;
    for (double v : j.p.a) {
        if (v < 0.0 || !std::isfinite(v))
            throw ConfigError("joint table: invalid probability " + std::to_string(v));
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-10)
        throw ConfigError("joint table: sums to " + std::to_string(s) + ", expected 1");
}

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

double conditional_entropy(const JointTable& j) {
    check_joint(j);
    double h_xy = 0.0;
    for (double v : j.p.a) h_xy += plogp(v);
    double h_x = 0.0;
    for (std::size_t r = 0; r < j.p.rows; ++r) {
        double px = 0.0;
        for (std::size_t c = 0; c < j.p.cols; ++c) px += j.p(r, c);
        h_x += plogp(px);
    }
    return h_xy - h_x;
}

double marginal_entropy_y(const JointTable& j) {
    check_joint(j);
    double h = 0.0;
    for (std::size_t c = 0; c < j.p.cols; ++c) {
        double py = 0.0;
        for (std::size_t r = 0; r < j.p.rows; ++r) py += j.p(r, c);
        h += plogp(py);
    }
    return h;
}

NgramModel::NgramModel(int order, double alpha, int vocab_size)
    : order_(order), alpha_(alpha), vocab_size_(vocab_size) {
    if (order < 0) throw ConfigError("ngram: order must be >= 0");
    if (alpha <= 0.0) throw ConfigError("ngram: smoothing alpha must be > 0");
    if (vocab_size < 1) throw ConfigError("ngram: vocabulary size must be >= 1");
}

void NgramModel::fit(const corpus::TokenStream& stream) {
    const auto& ids = stream.ids;
    const std::size_t n = static_cast<std::size_t>(order_);
    for (std::size_t t = n; t < ids.size(); ++t) {
        std::vector<int> ctx(ids.begin() + static_cast<std::ptrdiff_t>(t - n),
                             ids.begin() + static_cast<std::ptrdiff_t>(t));
        ++counts_[ctx][ids[t]];
        ++totals_[ctx];
    }
}

double NgramModel::conditional_prob(const std::vector<int>& context, int symbol) const {
    if (context.size() != static_cast<std::size_t>(order_))
        throw ConfigError("ngram: context length " + std::to_string(context.size()) +
                          " does not match order " + std::to_string(order_));
    const double v = static_cast<double>(vocab_size_);
    auto tot_it = totals_.find(context);
    if (tot_it == totals_.end()) return 1.0 / v;  // unseen context: all-alpha, uniform
    double count = 0.0;
    auto ct_it = counts_.find(context);
    auto sym_it = ct_it->second.find(symbol);
    if (sym_it != ct_it->second.end()) count = static_cast<double>(sym_it->second);
    return (count + alpha_) / (static_cast<double>(tot_it->second) + alpha_ * v);
}

NgramModel fit_ngram(const corpus::TokenStream& stream, int order, double alpha, int vocab_size) {
    NgramModel m(order, alpha, vocab_size);
    m.fit(stream);
    return m;
}

double ngram_cross_entropy(const NgramModel& model, const corpus::TokenStream& heldout) {
    const auto& ids = heldout.ids;
    if (ids.empty()) throw ConfigError("ngram_cross_entropy: empty held-out stream");
    const std::size_t n = static_cast<std::size_t>(model.order());
    double bits = 0.0;
    for (std::size_t t = 0; t < ids.size(); ++t) {
        if (t < n) {
            bits += std::log2(static_cast<double>(model.vocab_size()));  // uniform backoff
            continue;
        }
        std::vector<int> ctx(ids.begin() + static_cast<std::ptrdiff_t>(t - n),
                             ids.begin() + static_cast<std::ptrdiff_t>(t));
        bits -= std::log2(model.conditional_prob(ctx, ids[t]));
    }
    return bits / static_cast<double>(ids.size());
}

EntropyReport model_cross_entropy(const lstm::LstmParameters& params,
                                  const heads::HeadParameters& head,
                                  const std::vector<engine::EncodedInstance>& dataset) {
    if (head.out_hi > static_cast<int>(params.vocab_size()))
        throw ConfigError("model_cross_entropy: head range exceeds vocabulary of " +
                          std::to_string(params.vocab_size()));
    EntropyReport rep;
    double total_bits = 0.0;
    std::size_t total_syms = 0;
    for (const auto& inst : dataset) {
        auto trace = lstm::forward(params, inst);
        auto dists = heads::instance_distributions(trace, inst, params.embedding, head);
        std::vector<int> realized;
        realized.reserve(dists.size());
        for (std::size_t t = 0; t < inst.sequence.size(); ++t)
            if (inst.predict_mask[t]) realized.push_back(inst.sequence[t]);
        auto nll = heads::nll_and_gradient_seed(dists, realized);
        rep.per_instance_bits.push_back(nll.bits);
        total_bits += nll.bits;
        total_syms += realized.size();
    }
    rep.symbols = total_syms;
    rep.bits_per_symbol = total_syms == 0 ? 0.0 : total_bits / static_cast<double>(total_syms);
    if (!dataset.empty()) rep.family = engine::family_name(dataset.front().family);
    return rep;
}

}  // namespace taskent::entropy
