#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "taskent/numerics.hpp"
#include "taskent/rng.hpp"

using namespace taskent;
using num::Matrix;
using num::Vec;

TEST_CASE("matvec basics") {
    CHECK(num::matvec(Matrix::identity(3), Vec{1, 2, 3}) == Vec{1, 2, 3});
    CHECK(num::matvec(Matrix(2, 2), Vec{5, 7}) == Vec{0, 0});

    Matrix m(2, 2);
    m(0, 0) = 1;
    m(0, 1) = 2;
    m(1, 0) = 3;
    m(1, 1) = 4;
    CHECK(num::matvec(m, Vec{1, 1}) == Vec{3, 7});

    CHECK_THROWS_WITH_AS(num::matvec(m, Vec{1, 2, 3}),
                         "matvec: 2x2 matrix vs length-3 vector", std::invalid_argument);
}

TEST_CASE("matvec is linear") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t r = 1 + rng.below(5), c = 1 + rng.below(5);
        Matrix m(r, c);
        for (auto& x : m.a) x = rng.uniform(-2, 2);
        Vec u(c), v(c);
        for (auto& x : u) x = rng.uniform(-2, 2);
        for (auto& x : v) x = rng.uniform(-2, 2);
        const double alpha = rng.uniform(-3, 3), beta = rng.uniform(-3, 3);

        Vec combo(c);
        for (std::size_t i = 0; i < c; ++i) combo[i] = alpha * u[i] + beta * v[i];
        const Vec lhs = num::matvec(m, combo);
        const Vec mu = num::matvec(m, u), mv = num::matvec(m, v);
        for (std::size_t i = 0; i < r; ++i)
            CHECK(lhs[i] == doctest::Approx(alpha * mu[i] + beta * mv[i]).epsilon(1e-10));
    }
}

TEST_CASE("matvec_transposed matches explicit transpose") {
    Rng rng(9);
    Matrix m(3, 4);
    for (auto& x : m.a) x = rng.uniform(-1, 1);
    Vec v{0.5, -1.5, 2.0};
    const Vec got = num::matvec_transposed(m, v);
    for (std::size_t c = 0; c < m.cols; ++c) {
        double want = 0;
        for (std::size_t r = 0; r < m.rows; ++r) want += m(r, c) * v[r];
        CHECK(got[c] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("dot") {
    CHECK(num::dot(Vec{0, 0}, Vec{3.5, -2}) == 0.0);
    CHECK(num::dot(Vec{3, 4}, Vec{3, 4}) == 25.0);
    CHECK_THROWS_AS(num::dot(Vec{1}, Vec{1, 2}), std::invalid_argument);

    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        Vec a(4), b(4);
        for (auto& x : a) x = rng.uniform(-5, 5);
        for (auto& x : b) x = rng.uniform(-5, 5);
        CHECK(num::dot(a, b) == num::dot(b, a));
    }
}

TEST_CASE("elementwise functions") {
    const Vec s = num::sigmoid(Vec{0, 0});
    CHECK(s[0] == 0.5);
    CHECK(s[1] == 0.5);
    CHECK(num::tanh_vec(Vec{0})[0] == 0.0);
    CHECK(num::sigmoid(Vec{std::log(3.0)})[0] == doctest::Approx(0.75).epsilon(1e-14));

    CHECK(num::hadamard(Vec{2, 3}, Vec{4, 5}) == Vec{8, 15});
    CHECK(num::add(Vec{2, 3}, Vec{4, 5}) == Vec{6, 8});
    CHECK_THROWS_AS(num::hadamard(Vec{1}, Vec{1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(num::add(Vec{1}, Vec{1, 2}), std::invalid_argument);
}

TEST_CASE("log_sum_exp") {
    CHECK(num::log_sum_exp(Vec{0, 0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(num::log_sum_exp(Vec{4.2}) == 4.2);
    CHECK(num::log_sum_exp(Vec{1000, 1000}) ==
          doctest::Approx(1000 + std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(num::log_sum_exp(Vec{}), std::invalid_argument);

    // shift identity LSE(v + c) = LSE(v) + c
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        Vec v(1 + rng.below(6));
        for (auto& x : v) x = rng.uniform(-1000, 1000);
        const double c = rng.uniform(-500, 500);
        Vec shifted = v;
        for (auto& x : shifted) x += c;
        CHECK(num::log_sum_exp(shifted) ==
              doctest::Approx(num::log_sum_exp(v) + c).epsilon(1e-10));
    }
}

TEST_CASE("softmax") {
    const Vec u = num::softmax(Vec{0, 0, 0});
    for (double p : u) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-14));

    const Vec d = num::softmax(Vec{std::log(3.0), 0.0});
    CHECK(d[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.25).epsilon(1e-12));

    Rng rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        Vec v(1 + rng.below(8));
        for (auto& x : v) x = rng.uniform(-1000, 1000);
        const Vec p = num::softmax(v);
        double sum = 0;
        for (double x : p) {
            CHECK(std::isfinite(x));
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        // shift invariance
        const double c = rng.uniform(-100, 100);
        Vec shifted = v;
        for (auto& x : shifted) x += c;
        const Vec q = num::softmax(shifted);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-10));
    }
}

TEST_CASE("no NaN/Inf escapes for large finite inputs") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        Vec v(4);
        for (auto& x : v) x = rng.uniform(-1e3, 1e3);
        CHECK(std::isfinite(num::log_sum_exp(v)));
        for (double p : num::softmax(v)) CHECK(std::isfinite(p));
        for (double p : num::sigmoid(v)) CHECK(std::isfinite(p));
        for (double p : num::tanh_vec(v)) CHECK(std::isfinite(p));
    }
}
