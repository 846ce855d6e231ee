#include "taskent/lstm.hpp"

#include <stdexcept>

#include "taskent/errors.hpp"

namespace taskent::lstm {

using num::add;
using num::hadamard;
using num::matvec;
using num::matvec_transposed;
using num::sigmoid;
using num::tanh_vec;

LstmParameters LstmParameters::zeros(std::size_t hidden, std::size_t embed, std::size_t vocab) {
    LstmParameters p;
    p.w_i = Matrix(hidden, embed);
    p.v_i = Matrix(hidden, hidden);
    p.w_f = Matrix(hidden, embed);
    p.v_f = Matrix(hidden, hidden);
    p.w_o = Matrix(hidden, embed);
    p.v_o = Matrix(hidden, hidden);
    p.w_l = Matrix(hidden, embed);
    p.v_l = Matrix(hidden, hidden);
    p.embedding = Matrix(vocab, embed);
    return p;
}

Vec LstmParameters::embedding_row(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= embedding.rows)
        throw ConfigError("lstm: token id " + std::to_string(id) +
                          " outside embedding table of size " + std::to_string(embedding.rows));
    const double* row = embedding.a.data() + static_cast<std::size_t>(id) * embedding.cols;
    return Vec(row, row + embedding.cols);
}

namespace {

StepTrace step_trace(const LstmParameters& p, int token, const Vec& prev_e, const Vec& prev_m) {
    if (prev_e.size() != p.hidden_dim() || prev_m.size() != p.hidden_dim())
        throw ConfigError("lstm_step: state dimension " + std::to_string(prev_e.size()) +
                          " does not match hidden dimension " + std::to_string(p.hidden_dim()));
    const Vec x = p.embedding_row(token);
    StepTrace s;
    s.token = token;
    s.i = sigmoid(add(matvec(p.w_i, x), matvec(p.v_i, prev_e)));
    s.f = sigmoid(add(matvec(p.w_f, x), matvec(p.v_f, prev_e)));
    s.o = sigmoid(add(matvec(p.w_o, x), matvec(p.v_o, prev_e)));
    s.l = tanh_vec(add(matvec(p.w_l, x), matvec(p.v_l, prev_e)));
    s.m = add(hadamard(s.f, prev_m), hadamard(s.i, s.l));
    s.e = hadamard(s.o, s.m);
    return s;
}

}  // namespace

LstmState lstm_step(const LstmParameters& p, int token, const LstmState& prev) {
    StepTrace s = step_trace(p, token, prev.e, prev.m);
    return LstmState{std::move(s.e), std::move(s.m)};
}

std::vector<StepTrace> forward(const LstmParameters& p, const engine::EncodedInstance& inst) {
    std::vector<StepTrace> trace;
    trace.reserve(inst.sequence.size());
    Vec zero(p.hidden_dim(), 0.0);
    const Vec* prev_e = &zero;
    const Vec* prev_m = &zero;
    for (int token : inst.sequence) {
        trace.push_back(step_trace(p, token, *prev_e, *prev_m));
        prev_e = &trace.back().e;
        prev_m = &trace.back().m;
    }
    return trace;
}

Gradients Gradients::zeros_like(const LstmParameters& p, std::size_t head_rows,
                                std::size_t head_cols) {
    Gradients g;
    g.w_i = Matrix(p.w_i.rows, p.w_i.cols);
    g.v_i = Matrix(p.v_i.rows, p.v_i.cols);
    g.w_f = Matrix(p.w_f.rows, p.w_f.cols);
    g.v_f = Matrix(p.v_f.rows, p.v_f.cols);
    g.w_o = Matrix(p.w_o.rows, p.w_o.cols);
    g.v_o = Matrix(p.v_o.rows, p.v_o.cols);
    g.w_l = Matrix(p.w_l.rows, p.w_l.cols);
    g.v_l = Matrix(p.v_l.rows, p.v_l.cols);
    g.embedding = Matrix(p.embedding.rows, p.embedding.cols);
    g.head_w = Matrix(head_rows, head_cols);
    g.head_u = Vec(head_rows, 0.0);
    return g;
}

namespace {

void for_each_tensor(Gradients& g, const auto& fn) {
    fn(g.w_i.a);
    fn(g.v_i.a);
    fn(g.w_f.a);
    fn(g.v_f.a);
    fn(g.w_o.a);
    fn(g.v_o.a);
    fn(g.w_l.a);
    fn(g.v_l.a);
    fn(g.embedding.a);
    fn(g.head_w.a);
    fn(g.head_u);
}

void for_each_tensor(const Gradients& g, const auto& fn) {
    fn(g.w_i.a);
    fn(g.v_i.a);
    fn(g.w_f.a);
    fn(g.v_f.a);
    fn(g.w_o.a);
    fn(g.v_o.a);
    fn(g.w_l.a);
    fn(g.v_l.a);
    fn(g.embedding.a);
    fn(g.head_w.a);
    fn(g.head_u);
}

}  // namespace

void Gradients::zero() {
    for_each_tensor(*this, [](std::vector<double>& t) { std::fill(t.begin(), t.end(), 0.0); });
}

double Gradients::squared_norm() const {
    double s = 0.0;
    for_each_tensor(*this, [&s](const std::vector<double>& t) {
        for (double x : t) s += x * x;
    });
    return s;
}

void Gradients::scale(double f) {
    for_each_tensor(*this, [f](std::vector<double>& t) {
        for (double& x : t) x *= f;
    });
}

void Gradients::add(const Gradients& other) {
    auto addv = [](std::vector<double>& dst, const std::vector<double>& src) {
        if (dst.size() != src.size()) throw ConfigError("gradients: shape mismatch in add");
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    };
    addv(w_i.a, other.w_i.a);
    addv(v_i.a, other.v_i.a);
    addv(w_f.a, other.w_f.a);
    addv(v_f.a, other.v_f.a);
    addv(w_o.a, other.w_o.a);
    addv(v_o.a, other.v_o.a);
    addv(w_l.a, other.w_l.a);
    addv(v_l.a, other.v_l.a);
    addv(embedding.a, other.embedding.a);
    addv(head_w.a, other.head_w.a);
    addv(head_u, other.head_u);
}

void backward(const LstmParameters& p, const engine::EncodedInstance& inst,
              const std::vector<StepTrace>& trace, const std::vector<Vec>& state_grads,
              Gradients& g) {
    const std::size_t n = trace.size();
    if (inst.sequence.size() != n || state_grads.size() != n)
        throw ConfigError("lstm backward: trace/seed length mismatch");
    const std::size_t hidden = p.hidden_dim();

    Vec de(hidden, 0.0);  // dLoss/d e_t flowing back through the recurrence
    Vec dm(hidden, 0.0);  // dLoss/d m_t from step t+1
    const Vec zero(hidden, 0.0);

    for (std::size_t ti = n; ti-- > 0;) {
        const StepTrace& s = trace[ti];
        if (state_grads[ti].size() != hidden)
            throw ConfigError("lstm backward: seed " + std::to_string(ti) + " has length " +
                              std::to_string(state_grads[ti].size()) + ", expected " +
                              std::to_string(hidden));
        for (std::size_t k = 0; k < hidden; ++k) de[k] += state_grads[ti][k];

        const Vec& prev_e = ti == 0 ? zero : trace[ti - 1].e;
        const Vec& prev_m = ti == 0 ? zero : trace[ti - 1].m;

        // e = o . m ; m = f . m_prev + i . l
        Vec d_o(hidden), d_f(hidden), d_i(hidden), d_l(hidden), dm_prev(hidden);
        for (std::size_t k = 0; k < hidden; ++k) {
            dm[k] += de[k] * s.o[k];
            d_o[k] = de[k] * s.m[k];
            d_f[k] = dm[k] * prev_m[k];
            d_i[k] = dm[k] * s.l[k];
            d_l[k] = dm[k] * s.i[k];
            dm_prev[k] = dm[k] * s.f[k];
        }

        // through the activations: sigmoid' = g(1-g), tanh' = 1 - l^2
        Vec da_i(hidden), da_f(hidden), da_o(hidden), da_l(hidden);
        for (std::size_t k = 0; k < hidden; ++k) {
            da_i[k] = d_i[k] * s.i[k] * (1.0 - s.i[k]);
            da_f[k] = d_f[k] * s.f[k] * (1.0 - s.f[k]);
            da_o[k] = d_o[k] * s.o[k] * (1.0 - s.o[k]);
            da_l[k] = d_l[k] * (1.0 - s.l[k] * s.l[k]);
        }

        const Vec x = p.embedding_row(s.token);
        num::add_outer(g.w_i, da_i, x);
        num::add_outer(g.w_f, da_f, x);
        num::add_outer(g.w_o, da_o, x);
        num::add_outer(g.w_l, da_l, x);
        num::add_outer(g.v_i, da_i, prev_e);
        num::add_outer(g.v_f, da_f, prev_e);
        num::add_outer(g.v_o, da_o, prev_e);
        num::add_outer(g.v_l, da_l, prev_e);

        // d x = sum_g W_g^T da_g accumulates into the token's embedding row
        Vec dx = matvec_transposed(p.w_i, da_i);
        {
            Vec t2 = matvec_transposed(p.w_f, da_f);
            Vec t3 = matvec_transposed(p.w_o, da_o);
            Vec t4 = matvec_transposed(p.w_l, da_l);
            for (std::size_t c = 0; c < dx.size(); ++c) dx[c] += t2[c] + t3[c] + t4[c];
        }
        double* emb_row = g.embedding.a.data() + static_cast<std::size_t>(s.token) * g.embedding.cols;
        for (std::size_t c = 0; c < dx.size(); ++c) emb_row[c] += dx[c];

        // d e_{t-1} = sum_g V_g^T da_g
        Vec dh = matvec_transposed(p.v_i, da_i);
        {
            Vec t2 = matvec_transposed(p.v_f, da_f);
            Vec t3 = matvec_transposed(p.v_o, da_o);
            Vec t4 = matvec_transposed(p.v_l, da_l);
            for (std::size_t k = 0; k < hidden; ++k) dh[k] += t2[k] + t3[k] + t4[k];
        }
        de = std::move(dh);
        dm = std::move(dm_prev);
    }
}

}  // namespace taskent::lstm
