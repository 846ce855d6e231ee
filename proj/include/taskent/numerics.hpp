#ifndef TASKENT_NUMERICS_HPP
#define TASKENT_NUMERICS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace taskent::num {

// All math in this project is 64-bit. Reductions run left to right so a
// fixed seed gives bit-identical results.
using Vec = std::vector<double>;

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::size_t size() const { return a.size(); }
    bool empty() const { return a.empty(); }

    static Matrix identity(std::size_t n);
};

// y = M v.  Throws std::invalid_argument naming the dimensions on mismatch.
Vec matvec(const Matrix& m, const Vec& v);

// y = M^T v, without materializing the transpose.
Vec matvec_transposed(const Matrix& m, const Vec& v);

// g += x y^T (outer product accumulation).
void add_outer(Matrix& g, const Vec& x, const Vec& y);

double dot(const Vec& a, const Vec& b);

Vec sigmoid(const Vec& v);
Vec tanh_vec(const Vec& v);
Vec hadamard(const Vec& a, const Vec& b);   // elementwise product
Vec add(const Vec& a, const Vec& b);        // elementwise sum

// log sum_i exp(v_i), max-shifted so magnitude-1e3 inputs do not overflow.
double log_sum_exp(const Vec& v);

// p_i = exp(v_i - log_sum_exp(v)); sums to 1 within 1e-12, all strictly > 0.
Vec softmax(const Vec& v);

}  // namespace taskent::num

#endif
