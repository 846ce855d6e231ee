#include "taskent/heads.hpp"

#include <cmath>

#include "taskent/errors.hpp"

namespace taskent::heads {

std::string scorer_name(Scorer s) {
    switch (s) {
        case Scorer::DotProduct: return "dot";
        case Scorer::AlignedLinear: return "aligned_linear";
        case Scorer::AlignedTanh: return "aligned_tanh";
    }
    throw ConfigError("unknown scorer");
}

Scorer parse_scorer(const std::string& name) {
    if (name == "dot") return Scorer::DotProduct;
    if (name == "aligned_linear") return Scorer::AlignedLinear;
    if (name == "aligned_tanh") return Scorer::AlignedTanh;
    throw ConfigError("unknown scorer '" + name + "' (expected dot|aligned_linear|aligned_tanh)");
}

double StepDistribution::log_prob_of(int id) const {
    const double p = prob_of(id);
    return std::log(p);
}

namespace {

void check_candidates(const HeadParameters& head, const Matrix& embedding) {
    if (head.out_lo < 0 || head.out_hi <= head.out_lo ||
        static_cast<std::size_t>(head.out_hi) > embedding.rows)
        throw ConfigError("head: output range [" + std::to_string(head.out_lo) + "," +
                          std::to_string(head.out_hi) + ") invalid for vocabulary of " +
                          std::to_string(embedding.rows));
}

Vec embedding_row(const Matrix& embedding, int id) {
    const double* row = embedding.a.data() + static_cast<std::size_t>(id) * embedding.cols;
    return Vec(row, row + embedding.cols);
}

StepDistribution from_logits(const Vec& logits, int out_lo) {
    StepDistribution d;
    d.probs = num::softmax(logits);
    d.out_lo = out_lo;
    return d;
}

Vec dot_logits(const Vec& e_prev, const Matrix& embedding, const HeadParameters& head) {
    if (e_prev.size() != embedding.cols)
        throw ConfigError("head: state dimension " + std::to_string(e_prev.size()) +
                          " does not match embedding dimension " + std::to_string(embedding.cols));
    Vec logits(static_cast<std::size_t>(head.candidates()));
    for (int c = 0; c < head.candidates(); ++c) {
        const double* row =
            embedding.a.data() + static_cast<std::size_t>(head.out_lo + c) * embedding.cols;
        double s = 0.0;
        for (std::size_t k = 0; k < embedding.cols; ++k) s += e_prev[k] * row[k];
        logits[static_cast<std::size_t>(c)] = s;
    }
    return logits;
}

struct AlignedTrace {
    std::vector<Vec> z;  // W . concat per candidate (pre-activation)
    std::vector<Vec> a;  // activation output per candidate
};

Vec aligned_logits(const Vec& e_prev, const Vec& e_x, const Matrix& embedding,
                   const HeadParameters& head, AlignedTrace* trace) {
    const std::size_t k = embedding.cols;
    if (e_prev.size() != k || e_x.size() != k)
        throw ConfigError("aligned head: expected state/input vectors of dimension " +
                          std::to_string(k) + ", got " + std::to_string(e_prev.size()) + " and " +
                          std::to_string(e_x.size()));
    if (head.w.cols != 3 * k || head.w.rows != head.u.size())
        throw ConfigError("aligned head: W is " + std::to_string(head.w.rows) + "x" +
                          std::to_string(head.w.cols) + ", U has length " +
                          std::to_string(head.u.size()) + "; expected L x " + std::to_string(3 * k) +
                          " and L");
    const bool use_tanh = head.scorer == Scorer::AlignedTanh;

    Vec concat(3 * k);
    for (std::size_t j = 0; j < k; ++j) concat[j] = e_prev[j];
    for (std::size_t j = 0; j < k; ++j) concat[2 * k + j] = e_x[j];

    Vec logits(static_cast<std::size_t>(head.candidates()));
    for (int c = 0; c < head.candidates(); ++c) {
        const double* ey =
            embedding.a.data() + static_cast<std::size_t>(head.out_lo + c) * embedding.cols;
        for (std::size_t j = 0; j < k; ++j) concat[k + j] = ey[j];
        Vec z = num::matvec(head.w, concat);
        Vec a = use_tanh ? num::tanh_vec(z) : z;
        logits[static_cast<std::size_t>(c)] = num::dot(head.u, a);
        if (trace) {
            trace->z.push_back(std::move(z));
            trace->a.push_back(std::move(a));
        }
    }
    return logits;
}

// position of e_prev for the head attached at sequence position t
const Vec* state_before(const std::vector<lstm::StepTrace>& trace, std::size_t t, const Vec& zero) {
    return t == 0 ? &zero : &trace[t - 1].e;
}

}  // namespace

StepDistribution predict_next_prob(const Vec& e_prev, const Matrix& embedding,
                                   const HeadParameters& head) {
    check_candidates(head, embedding);
    return from_logits(dot_logits(e_prev, embedding, head), head.out_lo);
}

StepDistribution single_label_prob(const Vec& e_n, const Matrix& embedding,
                                   const HeadParameters& head) {
    check_candidates(head, embedding);
    return from_logits(dot_logits(e_n, embedding, head), head.out_lo);
}

StepDistribution aligned_prob(const Vec& e_prev, const Vec& e_x, const Matrix& embedding,
                              const HeadParameters& head) {
    check_candidates(head, embedding);
    return from_logits(aligned_logits(e_prev, e_x, embedding, head, nullptr), head.out_lo);
}

std::vector<StepDistribution> instance_distributions(const std::vector<lstm::StepTrace>& trace,
                                                     const engine::EncodedInstance& inst,
                                                     const Matrix& embedding,
                                                     const HeadParameters& head) {
    check_candidates(head, embedding);
    if (trace.size() != inst.sequence.size())
        throw ConfigError("heads: trace length " + std::to_string(trace.size()) +
                          " does not match instance length " + std::to_string(inst.sequence.size()));
    const bool aligned = inst.family == engine::TaskFamily::AlignedLabeling;
    if (aligned && (head.scorer == Scorer::DotProduct))
        throw ConfigError("heads: aligned instances require an aligned scorer");

    const Vec zero(embedding.cols, 0.0);
    std::vector<StepDistribution> dists;
    std::size_t out_idx = 0;
    for (std::size_t t = 0; t < trace.size(); ++t) {
        if (!inst.predict_mask[t]) continue;
        const Vec* e_prev = state_before(trace, t, zero);
        if (aligned) {
            const int x_pos = inst.alignment[out_idx];
            const Vec e_x = embedding_row(embedding, inst.sequence[static_cast<std::size_t>(x_pos)]);
            dists.push_back(from_logits(aligned_logits(*e_prev, e_x, embedding, head, nullptr),
                                        head.out_lo));
        } else {
            dists.push_back(from_logits(dot_logits(*e_prev, embedding, head), head.out_lo));
        }
        ++out_idx;
    }
    return dists;
}

NllResult nll_and_gradient_seed(const std::vector<StepDistribution>& dists,
                                const std::vector<int>& realized) {
    if (dists.size() != realized.size())
        throw ConfigError("nll: " + std::to_string(dists.size()) + " distributions vs " +
                          std::to_string(realized.size()) + " realized symbols");
    NllResult r;
    r.logit_grads.reserve(dists.size());
    for (std::size_t k = 0; k < dists.size(); ++k) {
        const auto& d = dists[k];
        const int idx = realized[k] - d.out_lo;
        if (idx < 0 || static_cast<std::size_t>(idx) >= d.probs.size())
            throw ConfigError("nll: realized id " + std::to_string(realized[k]) +
                              " outside head output range [" + std::to_string(d.out_lo) + "," +
                              std::to_string(d.out_lo + static_cast<int>(d.probs.size())) + ")");
        r.bits -= std::log2(d.probs[static_cast<std::size_t>(idx)]);
        Vec seed = d.probs;  // softmax - onehot, in natural-log units
        seed[static_cast<std::size_t>(idx)] -= 1.0;
        r.logit_grads.push_back(std::move(seed));
    }
    return r;
}

std::vector<Vec> backward_heads(const std::vector<lstm::StepTrace>& trace,
                                const engine::EncodedInstance& inst, const Matrix& embedding,
                                const HeadParameters& head,
                                const std::vector<StepDistribution>& dists,
                                const std::vector<Vec>& logit_grads, lstm::Gradients& g) {
    check_candidates(head, embedding);
    if (logit_grads.size() != dists.size())
        throw ConfigError("backward_heads: seed/distribution count mismatch");
    const std::size_t kdim = embedding.cols;
    const bool aligned = inst.family == engine::TaskFamily::AlignedLabeling;
    const Vec zero(kdim, 0.0);

    std::vector<Vec> state_grads(trace.size(), Vec(trace.empty() ? 0 : trace[0].e.size(), 0.0));

    std::size_t out_idx = 0;
    for (std::size_t t = 0; t < trace.size(); ++t) {
        if (!inst.predict_mask[t]) continue;
        const Vec* e_prev = state_before(trace, t, zero);
        const Vec& dlogit = logit_grads[out_idx];
        if (static_cast<int>(dlogit.size()) != head.candidates())
            throw ConfigError("backward_heads: seed " + std::to_string(out_idx) +
                              " has wrong candidate count");

        Vec de_prev(kdim, 0.0);
        if (!aligned) {
            // logit_c = e_prev . e_c
            for (int c = 0; c < head.candidates(); ++c) {
                const double gl = dlogit[static_cast<std::size_t>(c)];
                const std::size_t row = static_cast<std::size_t>(head.out_lo + c);
                const double* ey = embedding.a.data() + row * kdim;
                double* gey = g.embedding.a.data() + row * kdim;
                for (std::size_t j = 0; j < kdim; ++j) {
                    de_prev[j] += gl * ey[j];
                    gey[j] += gl * (*e_prev)[j];
                }
            }
        } else {
            const int x_pos = inst.alignment[out_idx];
            const int x_tok = inst.sequence[static_cast<std::size_t>(x_pos)];
            const Vec e_x = embedding_row(embedding, x_tok);
            AlignedTrace atr;
            aligned_logits(*e_prev, e_x, embedding, head, &atr);
            const bool use_tanh = head.scorer == Scorer::AlignedTanh;

            Vec concat(3 * kdim);
            for (std::size_t j = 0; j < kdim; ++j) concat[j] = (*e_prev)[j];
            for (std::size_t j = 0; j < kdim; ++j) concat[2 * kdim + j] = e_x[j];

            Vec de_x(kdim, 0.0);
            for (int c = 0; c < head.candidates(); ++c) {
                const double gl = dlogit[static_cast<std::size_t>(c)];
                const std::size_t row = static_cast<std::size_t>(head.out_lo + c);
                const double* ey = embedding.a.data() + row * kdim;
                for (std::size_t j = 0; j < kdim; ++j) concat[kdim + j] = ey[j];

                const Vec& a = atr.a[static_cast<std::size_t>(c)];
                // dU += gl * a ; dz = gl * U (. (1 - a^2) for tanh)
                Vec dz(head.u.size());
                for (std::size_t r = 0; r < head.u.size(); ++r) {
                    g.head_u[r] += gl * a[r];
                    double d = gl * head.u[r];
                    if (use_tanh) d *= 1.0 - a[r] * a[r];
                    dz[r] = d;
                }
                num::add_outer(g.head_w, dz, concat);
                Vec dconcat = num::matvec_transposed(head.w, dz);
                double* gey = g.embedding.a.data() + row * kdim;
                for (std::size_t j = 0; j < kdim; ++j) {
                    de_prev[j] += dconcat[j];
                    gey[j] += dconcat[kdim + j];
                    de_x[j] += dconcat[2 * kdim + j];
                }
            }
            double* gx = g.embedding.a.data() + static_cast<std::size_t>(x_tok) * kdim;
            for (std::size_t j = 0; j < kdim; ++j) gx[j] += de_x[j];
        }

        if (t > 0) {
            for (std::size_t j = 0; j < de_prev.size(); ++j) state_grads[t - 1][j] += de_prev[j];
        }
        ++out_idx;
    }
    return state_grads;
}

}  // namespace taskent::heads
