#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "taskent/engine.hpp"
#include "taskent/errors.hpp"
#include "taskent/trainer.hpp"

using namespace taskent;
using engine::JointVocab;
using engine::TaskFamily;
using train::TrainConfig;

namespace {

JointVocab tiny_vocab() { return JointVocab::shared(corpus::build_vocabulary({"a", "b", "c"}, 10)); }

TrainConfig tiny_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.hidden_dim = 4;
    cfg.embed_dim = 4;
    cfg.seed = seed;
    cfg.epochs = 2;
    cfg.batch_size = 2;
    return cfg;
}

std::vector<engine::EncodedInstance> tiny_dataset(const JointVocab& jv) {
    std::vector<engine::EncodedInstance> ds;
    ds.push_back(engine::encode_instance(TaskFamily::Prediction, {},
                                         jv.encode_output({"a", "b", "a"}), false, jv.sep_id()));
    ds.push_back(engine::encode_instance(TaskFamily::Prediction, {},
                                         jv.encode_output({"b", "c"}), false, jv.sep_id()));
    ds.push_back(engine::encode_instance(TaskFamily::Prediction, {},
                                         jv.encode_output({"c", "a", "b"}), false, jv.sep_id()));
    return ds;
}

}  // namespace

TEST_CASE("init_parameters is seeded and range-bounded") {
    auto jv = tiny_vocab();
    auto cfg = tiny_config(42);
    auto a = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct, 0,
                                    jv.out_hi(true));
    auto b = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct, 0,
                                    jv.out_hi(true));
    CHECK(a.params.w_i.a == b.params.w_i.a);
    CHECK(a.params.embedding.a == b.params.embedding.a);

    for (double x : a.params.v_l.a) {
        CHECK(x >= -0.1);
        CHECK(x <= 0.1);
    }

    cfg.seed = 43;
    auto c = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct, 0,
                                    jv.out_hi(true));
    CHECK(a.params.w_i.a != c.params.w_i.a);
}

TEST_CASE("init rejects inconsistent dimensions and head pairings") {
    auto jv = tiny_vocab();
    auto cfg = tiny_config(1);
    cfg.embed_dim = 5;
    CHECK_THROWS_AS(train::init_parameters(cfg, jv, TaskFamily::Prediction,
                                           heads::Scorer::DotProduct, 0, 3),
                    ConfigError);
    cfg.embed_dim = 4;
    CHECK_THROWS_AS(train::init_parameters(cfg, jv, TaskFamily::AlignedLabeling,
                                           heads::Scorer::DotProduct, 0, 3),
                    ConfigError);
    CHECK_THROWS_AS(train::init_parameters(cfg, jv, TaskFamily::Prediction,
                                           heads::Scorer::AlignedTanh, 0, 3),
                    ConfigError);
}

TEST_CASE("pretrained embedding rows override the random init") {
    const std::string path = "/tmp/taskent_pretrained.txt";
    {
        std::ofstream out(path);
        out << "b 1 2 3 4\n";
    }
    auto jv = tiny_vocab();
    auto pre = train::load_pretrained(path, 4);
    auto m = train::init_parameters(tiny_config(7), jv, TaskFamily::Prediction,
                                    heads::Scorer::DotProduct, 0, jv.out_hi(true), &pre);
    const int b_id = jv.encode_input_token("b");
    CHECK(m.params.embedding(b_id, 0) == 1.0);
    CHECK(m.params.embedding(b_id, 3) == 4.0);

    // a row that is not in the file keeps its random init within the range
    const int a_id = jv.encode_input_token("a");
    CHECK(std::abs(m.params.embedding(a_id, 0)) <= 0.1);

    {
        std::ofstream out(path);
        out << "b 1 2\n";
    }
    CHECK_THROWS_AS(train::load_pretrained(path, 4), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("clip_gradients") {
    auto p = lstm::LstmParameters::zeros(2, 2, 3);
    auto g = lstm::Gradients::zeros_like(p, 0, 0);

    SUBCASE("below the threshold is unchanged") {
        g.w_i(0, 0) = 3.0;
        train::clip_gradients(g, 5.0);
        CHECK(g.w_i(0, 0) == 3.0);
    }
    SUBCASE("norm 10 against threshold 5 halves every component") {
        g.w_i(0, 0) = 6.0;
        g.v_i(1, 1) = 8.0;  // global norm 10
        train::clip_gradients(g, 5.0);
        CHECK(g.w_i(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(g.v_i(1, 1) == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("zero gradients stay zero") {
        train::clip_gradients(g, 5.0);
        CHECK(g.squared_norm() == 0.0);
    }
}

TEST_CASE("lr_schedule is the linear decay of the initial rate") {
    TrainConfig cfg;
    cfg.initial_lr = 0.5;
    cfg.epochs = 4;
    CHECK(train::lr_schedule(cfg, 0) == 0.5);
    CHECK(train::lr_schedule(cfg, 2) == doctest::Approx(0.25));
    CHECK(train::lr_schedule(cfg, 3) == doctest::Approx(0.125));
    CHECK(train::lr_schedule(cfg, 3) > 0.0);
    CHECK_THROWS_AS(train::lr_schedule(cfg, 4), ConfigError);
}

TEST_CASE("single-batch update is exactly theta - lr * g") {
    auto jv = tiny_vocab();
    auto cfg = tiny_config(11);
    cfg.epochs = 1;
    cfg.batch_size = 8;          // one batch covers the dataset
    cfg.clip_threshold = 1e9;    // keep clipping inactive
    cfg.initial_lr = 0.25;
    auto ds = tiny_dataset(jv);

    auto model = train::init_parameters(cfg, jv, TaskFamily::Prediction,
                                        heads::Scorer::DotProduct, 0, jv.out_hi(true));
    auto reference = model;

    // expected update, derived independently of train()
    auto g = lstm::Gradients::zeros_like(reference.params, 0, 0);
    for (const auto& inst : ds) train::instance_backward(reference, inst, g);

    train::train(cfg, ds, model);
    for (std::size_t i = 0; i < model.params.w_i.a.size(); ++i)
        CHECK(model.params.w_i.a[i] ==
              doctest::Approx(reference.params.w_i.a[i] - 0.25 * g.w_i.a[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < model.params.embedding.a.size(); ++i)
        CHECK(model.params.embedding.a[i] ==
              doctest::Approx(reference.params.embedding.a[i] - 0.25 * g.embedding.a[i])
                  .epsilon(1e-12));
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
    auto jv = tiny_vocab();
    auto cfg = tiny_config(17);
    auto ds = tiny_dataset(jv);

    auto m1 = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct,
                                     0, jv.out_hi(true));
    auto m2 = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct,
                                     0, jv.out_hi(true));
    auto log1 = train::train(cfg, ds, m1, &ds);
    auto log2 = train::train(cfg, ds, m2, &ds);

    CHECK(m1.params.w_i.a == m2.params.w_i.a);
    CHECK(m1.params.embedding.a == m2.params.embedding.a);
    REQUIRE(log1.size() == log2.size());
    for (std::size_t e = 0; e < log1.size(); ++e) {
        CHECK(log1[e].train_bits_per_symbol == log2[e].train_bits_per_symbol);
        CHECK(log1[e].heldout_bits_per_symbol == log2[e].heldout_bits_per_symbol);
    }
}

TEST_CASE("train writes one log entry per epoch and validates input") {
    auto jv = tiny_vocab();
    auto cfg = tiny_config(19);
    cfg.epochs = 4;
    auto ds = tiny_dataset(jv);
    auto m = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct, 0,
                                    jv.out_hi(true));
    auto log = train::train(cfg, ds, m);
    CHECK(log.size() == 4);
    for (std::size_t e = 0; e < 4; ++e) {
        CHECK(log[e].epoch == e);
        CHECK(log[e].lr == doctest::Approx(0.5 * (1.0 - e / 4.0)));
        CHECK(std::isnan(log[e].heldout_bits_per_symbol));
    }

    CHECK_THROWS_AS(train::train(cfg, {}, m), ConfigError);
    cfg.epochs = 0;
    CHECK_THROWS_AS(train::train(cfg, ds, m), ConfigError);
}

TEST_CASE("checkpoint round trip preserves every tensor and header field") {
    auto jv = tiny_vocab();
    auto cfg = tiny_config(23);
    auto m = train::init_parameters(cfg, jv, TaskFamily::Prediction, heads::Scorer::DotProduct, 0,
                                    jv.out_hi(true));
    m.config_hash = 0xdeadbeefcafe1234ULL;
    const std::string path = "/tmp/taskent_ckpt_rt.bin";
    save_checkpoint(m, path);
    auto r = load_checkpoint(path);
    CHECK(r.params.w_i.a == m.params.w_i.a);
    CHECK(r.params.v_l.a == m.params.v_l.a);
    CHECK(r.params.embedding.a == m.params.embedding.a);
    CHECK(r.family == m.family);
    CHECK(r.head.out_lo == m.head.out_lo);
    CHECK(r.head.out_hi == m.head.out_hi);
    CHECK(r.config_hash == m.config_hash);
    CHECK(r.seed == m.seed);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_checkpoint("/nonexistent/x.ckpt"), IoError);
}

TEST_CASE("aligned checkpoint round trip keeps the projection") {
    auto jv = engine::JointVocab::split(corpus::build_vocabulary({"x", "y"}, 10),
                                        corpus::build_vocabulary({"t0", "t1"}, 10));
    auto cfg = tiny_config(29);
    auto m = train::init_parameters(cfg, jv, TaskFamily::AlignedLabeling,
                                    heads::Scorer::AlignedTanh, jv.out_lo(false),
                                    jv.out_hi(false));
    const std::string path = "/tmp/taskent_ckpt_aligned.bin";
    save_checkpoint(m, path);
    auto r = load_checkpoint(path);
    CHECK(r.head.scorer == heads::Scorer::AlignedTanh);
    CHECK(r.head.w.a == m.head.w.a);
    CHECK(r.head.u == m.head.u);
    std::remove(path.c_str());
}
