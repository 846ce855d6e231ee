#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "taskent/corpus.hpp"
#include "taskent/errors.hpp"

using namespace taskent;
using corpus::Vocabulary;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/taskent_corpus_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

num::Matrix two_state_chain() {
    num::Matrix p(2, 2);
    p(0, 0) = 0.9;
    p(0, 1) = 0.1;
    p(1, 0) = 0.1;
    p(1, 1) = 0.9;
    return p;
}

// analytic oracle: -sum_i pi_i sum_j P_ij log2 P_ij
double rate_by_hand(const num::Matrix& p, const num::Vec& pi) {
    double h = 0;
    for (std::size_t i = 0; i < p.rows; ++i)
        for (std::size_t j = 0; j < p.cols; ++j)
            if (p(i, j) > 0) h -= pi[i] * p(i, j) * std::log2(p(i, j));
    return h;
}

}  // namespace

TEST_CASE("build_vocabulary frequency order and ids") {
    auto v = corpus::build_vocabulary({"a", "a", "b"}, 10);
    CHECK(v.content_size() == 2);
    CHECK(v.size() == 4);
    CHECK(v.encode_token("a") == 0);
    CHECK(v.encode_token("b") == 1);
    CHECK(v.unk_id() == 2);
    CHECK(v.sep_id() == 3);
}

TEST_CASE("empty corpus yields reserved-only vocabulary") {
    auto v = corpus::build_vocabulary({}, 5);
    CHECK(v.content_size() == 0);
    CHECK(v.size() == 2);
    CHECK(v.encode_token("anything") == v.unk_id());
}

TEST_CASE("vocabulary truncation breaks ties lexicographically") {
    auto v = corpus::build_vocabulary({"b", "a"}, 1);
    CHECK(v.content_size() == 1);
    CHECK(v.encode_token("a") == 0);
    CHECK(v.encode_token("b") == v.unk_id());
}

TEST_CASE("encode round-trips known tokens and maps unknowns to unk") {
    auto v = corpus::build_vocabulary({"a", "b", "a"}, 10);
    auto s = corpus::encode(v, {"a", "xyz", "b"});
    CHECK(s.ids == std::vector<int>{0, v.unk_id(), 1});
    CHECK(v.decode(s.ids[0]) == "a");
    CHECK(v.decode(s.ids[2]) == "b");

    for (int id = 0; id < v.content_size(); ++id)
        CHECK(v.encode_token(v.decode(id)) == id);
}

TEST_CASE("vocabulary file round trip") {
    auto v = corpus::build_vocabulary({"dog", "cat", "dog"}, 10);
    const std::string path = "/tmp/taskent_corpus_vocab_rt.vocab";
    v.save(path);

    std::ifstream in(path);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    CHECK(lines == std::vector<std::string>{"dog", "cat", "<unk>", "<sep>"});

    auto loaded = Vocabulary::load(path);
    CHECK(loaded.size() == v.size());
    CHECK(loaded.encode_token("cat") == 1);
    std::remove(path.c_str());
}

TEST_CASE("markov source validation") {
    num::Matrix bad(2, 2);
    bad(0, 0) = 0.5;
    bad(0, 1) = 0.6;
    bad(1, 0) = 0.5;
    bad(1, 1) = 0.5;
    CHECK_THROWS_AS(corpus::MarkovSource::from_transition(bad, 1), ConfigError);

    auto src = corpus::MarkovSource::from_transition(two_state_chain(), 1);
    CHECK(src.stationary[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(src.stationary[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("identity chain is constant with zero entropy rate") {
    auto src = corpus::MarkovSource::from_transition(num::Matrix::identity(3), 42);
    auto s = corpus::generate_markov(src, 50);
    for (int id : s.ids) CHECK(id == s.ids[0]);
    CHECK(corpus::entropy_rate(src) == 0.0);
}

TEST_CASE("uniform chain entropy rate and empirical unigram entropy") {
    const std::size_t k = 4;
    num::Matrix p(k, k);
    for (auto& x : p.a) x = 0.25;
    auto src = corpus::MarkovSource::from_transition(p, 7);
    CHECK(corpus::entropy_rate(src) == doctest::Approx(2.0).epsilon(1e-12));

    auto s = corpus::generate_markov(src, 100000);
    std::map<int, double> counts;
    for (int id : s.ids) counts[id] += 1.0;
    double h = 0;
    for (auto& [id, c] : counts) {
        const double q = c / static_cast<double>(s.ids.size());
        h -= q * std::log2(q);
    }
    CHECK(h == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("0.9/0.1 chain matches the analytic entropy rate") {
    auto src = corpus::MarkovSource::from_transition(two_state_chain(), 3);
    const double by_hand = rate_by_hand(src.transition, src.stationary);
    CHECK(by_hand == doctest::Approx(0.4690).epsilon(1e-3));
    CHECK(corpus::entropy_rate(src) == doctest::Approx(by_hand).epsilon(1e-12));
}

TEST_CASE("generate_markov is reproducible for a fixed seed") {
    auto src = corpus::MarkovSource::from_transition(two_state_chain(), 123);
    auto a = corpus::generate_markov(src, 1000);
    auto b = corpus::generate_markov(src, 1000);
    CHECK(a.ids == b.ids);
}

TEST_CASE("empirical bigram-conditional entropy approaches the rate") {
    auto src = corpus::MarkovSource::from_transition(two_state_chain(), 11);
    auto s = corpus::generate_markov(src, 100000);
    std::map<std::pair<int, int>, double> big;
    std::map<int, double> uni;
    for (std::size_t t = 1; t < s.ids.size(); ++t) {
        big[{s.ids[t - 1], s.ids[t]}] += 1.0;
        uni[s.ids[t - 1]] += 1.0;
    }
    double h = 0;
    const double n = static_cast<double>(s.ids.size() - 1);
    for (auto& [bg, c] : big) {
        const double p_pair = c / n;
        const double p_cond = c / uni[bg.first];
        h -= p_pair * std::log2(p_cond);
    }
    CHECK(std::abs(h - corpus::entropy_rate(src)) < 0.05);
}

TEST_CASE("entropy_rate is zero iff rows are unit vectors") {
    num::Matrix perm(2, 2);
    perm(0, 1) = 1.0;
    perm(1, 0) = 1.0;
    auto src = corpus::MarkovSource::from_transition(perm, 5);
    CHECK(corpus::entropy_rate(src) == 0.0);
    CHECK(corpus::entropy_rate(corpus::MarkovSource::from_transition(two_state_chain(), 5)) > 0.0);
}

TEST_CASE("order-2 source: analytic rate and reproducibility") {
    corpus::Order2Source src;
    src.symbols = 4;
    src.noise = {0.7, 0.2, 0.05, 0.05};
    src.seed = 9;
    const double expect =
        -(0.7 * std::log2(0.7) + 0.2 * std::log2(0.2) + 2 * 0.05 * std::log2(0.05));
    CHECK(corpus::entropy_rate(src) == doctest::Approx(expect).epsilon(1e-12));

    auto a = corpus::generate_order2(src, 500);
    auto b = corpus::generate_order2(src, 500);
    CHECK(a.ids == b.ids);
}

TEST_CASE("load_tsv parses aligned lines") {
    const auto path = write_temp("pos.tsv", "dog eats bones\tNN VBZ NNS\ndog eats apple\t0\n");
    auto rows = corpus::load_tsv(path, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].input == std::vector<std::string>{"dog", "eats", "bones"});
    CHECK(rows[0].output == std::vector<std::string>{"NN", "VBZ", "NNS"});
    CHECK(rows[1].output == std::vector<std::string>{"0"});
    CHECK(rows[1].line_no == 2);
    std::remove(path.c_str());
}

TEST_CASE("load_tsv rejects schema violations with the line number") {
    const auto path = write_temp("bad.tsv", "a b\tc d\ne\tf\tg\n");
    CHECK_THROWS_WITH_AS(corpus::load_tsv(path, 2), doctest::Contains(":2:"), ConfigError);
    CHECK_THROWS_AS(corpus::load_tsv("/nonexistent/file.tsv", 1), IoError);
    std::remove(path.c_str());
}
