#include "taskent/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taskent::num {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vec matvec(const Matrix& m, const Vec& v) {
    if (m.cols != v.size()) {
        throw std::invalid_argument("matvec: " + std::to_string(m.rows) + "x" +
                                    std::to_string(m.cols) + " matrix vs length-" +
                                    std::to_string(v.size()) + " vector");
    }
    Vec out(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double s = 0.0;
        const double* row = m.a.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * v[c];
        out[r] = s;
    }
    return out;
}

Vec matvec_transposed(const Matrix& m, const Vec& v) {
    if (m.rows != v.size()) {
        throw std::invalid_argument("matvec_transposed: " + std::to_string(m.rows) + "x" +
                                    std::to_string(m.cols) + " matrix vs length-" +
                                    std::to_string(v.size()) + " vector");
    }
    Vec out(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double vr = v[r];
        const double* row = m.a.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * vr;
    }
    return out;
}

void add_outer(Matrix& g, const Vec& x, const Vec& y) {
    if (g.rows != x.size() || g.cols != y.size()) {
        throw std::invalid_argument("add_outer: " + std::to_string(g.rows) + "x" +
                                    std::to_string(g.cols) + " accumulator vs " +
                                    std::to_string(x.size()) + " by " +
                                    std::to_string(y.size()) + " outer product");
    }
    for (std::size_t r = 0; r < g.rows; ++r) {
        double* row = g.a.data() + r * g.cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < g.cols; ++c) row[c] += xr * y[c];
    }
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: length " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec sigmoid(const Vec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-v[i]));
    return out;
}

Vec tanh_vec(const Vec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

Vec hadamard(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hadamard: length " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("add: length " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

double log_sum_exp(const Vec& v) {
    if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

Vec softmax(const Vec& v) {
    const double lse = log_sum_exp(v);
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i] - lse);
    return out;
}

}  // namespace taskent::num
