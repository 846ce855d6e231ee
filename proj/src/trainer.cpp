#include "taskent/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "taskent/entropy.hpp"
#include "taskent/errors.hpp"
#include "taskent/rng.hpp"

namespace taskent::train {

void TrainConfig::validate() const {
    if (initial_lr <= 0.0) throw ConfigError("config: initial_lr must be > 0");
    if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (clip_threshold <= 0.0) throw ConfigError("config: clip_threshold must be > 0");
    if (init_range <= 0.0) throw ConfigError("config: init_range must be > 0");
    if (hidden_dim < 1 || embed_dim < 1) throw ConfigError("config: dimensions must be >= 1");
}

PretrainedEmbeddings load_pretrained(const std::string& path, std::size_t embed_dim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read pretrained embeddings: " + path);
    PretrainedEmbeddings pre;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string sym;
        ss >> sym;
        num::Vec row;
        double v;
        while (ss >> v) row.push_back(v);
        if (row.size() != embed_dim)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": vector for '" + sym +
                              "' has dimension " + std::to_string(row.size()) + ", expected " +
                              std::to_string(embed_dim));
        pre.rows.emplace_back(std::move(sym), std::move(row));
    }
    return pre;
}

namespace {

void fill_uniform(std::vector<double>& t, Rng& rng, double range) {
    for (double& x : t) x = rng.uniform(-range, range);
}

}  // namespace

Model init_parameters(const TrainConfig& cfg, const engine::JointVocab& vocab,
                      engine::TaskFamily family, heads::Scorer scorer, int out_lo, int out_hi,
                      const PretrainedEmbeddings* pretrained) {
    cfg.validate();
    const bool aligned = scorer != heads::Scorer::DotProduct;
    if (family == engine::TaskFamily::AlignedLabeling && !aligned)
        throw ConfigError("init: aligned labeling requires an aligned scorer");
    if (family != engine::TaskFamily::AlignedLabeling && aligned)
        throw ConfigError("init: scorer " + heads::scorer_name(scorer) +
                          " only applies to aligned labeling");
    // Each head composes the running state with candidate embeddings, so the
    // two live in one space.
    if (cfg.hidden_dim != cfg.embed_dim)
        throw ConfigError("init: hidden_dim (" + std::to_string(cfg.hidden_dim) +
                          ") must equal embed_dim (" + std::to_string(cfg.embed_dim) + ")");
    if (out_lo < 0 || out_hi <= out_lo || out_hi > vocab.size())
        throw ConfigError("init: bad output range [" + std::to_string(out_lo) + "," +
                          std::to_string(out_hi) + ") for vocabulary of " +
                          std::to_string(vocab.size()));

    Model m;
    m.family = family;
    m.seed = cfg.seed;
    m.head.out_lo = out_lo;
    m.head.out_hi = out_hi;
    m.head.scorer = scorer;
    m.params = lstm::LstmParameters::zeros(cfg.hidden_dim, cfg.embed_dim,
                                           static_cast<std::size_t>(vocab.size()));

    Rng rng(cfg.seed);
    fill_uniform(m.params.w_i.a, rng, cfg.init_range);
    fill_uniform(m.params.v_i.a, rng, cfg.init_range);
    fill_uniform(m.params.w_f.a, rng, cfg.init_range);
    fill_uniform(m.params.v_f.a, rng, cfg.init_range);
    fill_uniform(m.params.w_o.a, rng, cfg.init_range);
    fill_uniform(m.params.v_o.a, rng, cfg.init_range);
    fill_uniform(m.params.w_l.a, rng, cfg.init_range);
    fill_uniform(m.params.v_l.a, rng, cfg.init_range);
    fill_uniform(m.params.embedding.a, rng, cfg.init_range);
    if (aligned) {
        const std::size_t rows = cfg.aligned_rows == 0 ? cfg.hidden_dim : cfg.aligned_rows;
        m.head.w = num::Matrix(rows, 3 * cfg.embed_dim);
        m.head.u = num::Vec(rows, 0.0);
        fill_uniform(m.head.w.a, rng, cfg.init_range);
        fill_uniform(m.head.u, rng, cfg.init_range);
    }

    if (pretrained) {
        for (const auto& [sym, row] : pretrained->rows) {
            const int id = vocab.encode_input_token(sym);
            if (id == vocab.unk_id() && sym != corpus::kUnkSymbol) continue;
            for (std::size_t c = 0; c < row.size(); ++c)
                m.params.embedding(static_cast<std::size_t>(id), c) = row[c];
        }
    }
    return m;
}

void clip_gradients(lstm::Gradients& g, double threshold) {
    if (threshold <= 0.0) throw ConfigError("clip_gradients: threshold must be > 0");
    const double norm = std::sqrt(g.squared_norm());
    if (norm > threshold) g.scale(threshold / norm);
}

double lr_schedule(const TrainConfig& cfg, std::size_t epoch) {
    if (epoch >= cfg.epochs)
        throw ConfigError("lr_schedule: epoch " + std::to_string(epoch) + " out of range [0," +
                          std::to_string(cfg.epochs) + ")");
    return cfg.initial_lr *
           (1.0 - static_cast<double>(epoch) / static_cast<double>(cfg.epochs));
}

double instance_backward(const Model& m, const engine::EncodedInstance& inst,
                         lstm::Gradients& g) {
    auto trace = lstm::forward(m.params, inst);
    auto dists = heads::instance_distributions(trace, inst, m.params.embedding, m.head);
    std::vector<int> realized;
    realized.reserve(dists.size());
    for (std::size_t t = 0; t < inst.sequence.size(); ++t)
        if (inst.predict_mask[t]) realized.push_back(inst.sequence[t]);
    auto nll = heads::nll_and_gradient_seed(dists, realized);
    auto state_grads =
        heads::backward_heads(trace, inst, m.params.embedding, m.head, dists, nll.logit_grads, g);
    lstm::backward(m.params, inst, trace, state_grads, g);
    return nll.bits;
}

namespace {

void apply_update(lstm::LstmParameters& p, heads::HeadParameters& h, const lstm::Gradients& g,
                  double lr) {
    auto upd = [lr](std::vector<double>& theta, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
    };
    upd(p.w_i.a, g.w_i.a);
    upd(p.v_i.a, g.v_i.a);
    upd(p.w_f.a, g.w_f.a);
    upd(p.v_f.a, g.v_f.a);
    upd(p.w_o.a, g.w_o.a);
    upd(p.v_o.a, g.v_o.a);
    upd(p.w_l.a, g.w_l.a);
    upd(p.v_l.a, g.v_l.a);
    upd(p.embedding.a, g.embedding.a);
    upd(h.w.a, g.head_w.a);
    upd(h.u, g.head_u);
}

}  // namespace

TrainLog train(const TrainConfig& cfg, const std::vector<engine::EncodedInstance>& dataset,
               Model& model, const std::vector<engine::EncodedInstance>* heldout) {
    cfg.validate();
    if (dataset.empty()) throw ConfigError("train: empty dataset");
    engine::validate_dataset(dataset, model.family);

    const std::size_t head_rows = model.head.w.rows;
    const std::size_t head_cols = model.head.w.cols;
    lstm::Gradients grad = lstm::Gradients::zeros_like(model.params, head_rows, head_cols);

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    TrainLog log;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lr = lr_schedule(cfg, epoch);
        shuffle_rng.shuffle(order);

        double epoch_bits = 0.0;
        std::size_t epoch_syms = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            grad.zero();
            double batch_bits = 0.0;
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            for (std::size_t k = start; k < end; ++k) {
                const auto& inst = dataset[order[k]];
                batch_bits += instance_backward(model, inst, grad);
                epoch_syms += inst.masked_count();
            }
            if (!std::isfinite(batch_bits))
                throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(start / cfg.batch_size));
            epoch_bits += batch_bits;
            clip_gradients(grad, cfg.clip_threshold);
            apply_update(model.params, model.head, grad, lr);
        }

        EpochLog e;
        e.epoch = epoch;
        e.lr = lr;
        e.train_bits_per_symbol =
            epoch_syms == 0 ? 0.0 : epoch_bits / static_cast<double>(epoch_syms);
        e.heldout_bits_per_symbol = std::numeric_limits<double>::quiet_NaN();
        if (heldout && !heldout->empty()) {
            auto rep = entropy::model_cross_entropy(model.params, model.head, *heldout);
            e.heldout_bits_per_symbol = rep.bits_per_symbol;
        }
        e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.push_back(e);
    }
    return log;
}

}  // namespace taskent::train
