#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taskent/engine.hpp"
#include "taskent/errors.hpp"

using namespace taskent;
using engine::EncodedInstance;
using engine::JointVocab;
using engine::TaskFamily;

namespace {

JointVocab pos_vocab() {
    return JointVocab::split(corpus::build_vocabulary({"dog", "eats", "bones", "apple"}, 10),
                             corpus::build_vocabulary({"NN", "VBZ", "NNS"}, 10));
}

}  // namespace

TEST_CASE("joint vocabulary layout: shared") {
    auto jv = JointVocab::shared(corpus::build_vocabulary({"a", "a", "b"}, 10));
    CHECK(jv.size() == 4);
    CHECK(jv.unk_id() == 2);
    CHECK(jv.sep_id() == 3);
    CHECK(jv.encode_input_token("a") == jv.encode_output_token("a"));
    CHECK(jv.out_lo(true) == 0);
    CHECK(jv.out_hi(true) == 3);   // content plus <unk>
    CHECK(jv.out_hi(false) == 2);  // content only
}

TEST_CASE("joint vocabulary layout: split") {
    auto jv = pos_vocab();
    // x block, then y block, then reserved
    CHECK(jv.size() == 4 + 3 + 2);
    CHECK(jv.unk_id() == 7);
    CHECK(jv.sep_id() == 8);
    CHECK(jv.encode_input_token("dog") < 4);
    CHECK(jv.encode_output_token("NN") >= 4);
    CHECK(jv.encode_output_token("NN") < 7);
    CHECK(jv.out_lo(false) == 4);
    CHECK(jv.out_hi(false) == 7);
    CHECK(jv.out_hi(true) == 8);
    CHECK(jv.decode(jv.encode_output_token("VBZ")) == "VBZ");
    CHECK(jv.decode(jv.encode_input_token("eats")) == "eats");
    // unknown tokens collapse to the shared <unk>
    CHECK(jv.encode_input_token("zzz") == jv.unk_id());
    CHECK(jv.encode_output_token("zzz") == jv.unk_id());
}

TEST_CASE("aligned labeling encoding: dog eats bones / NN VBZ NNS") {
    auto jv = pos_vocab();
    auto x = jv.encode_input({"dog", "eats", "bones"});
    auto y = jv.encode_output({"NN", "VBZ", "NNS"});
    auto inst = engine::encode_instance(TaskFamily::AlignedLabeling, x, y, false, jv.sep_id());

    REQUIRE(inst.sequence.size() == 7);
    CHECK(inst.sequence[3] == jv.sep_id());
    CHECK(inst.masked_count() == 3);
    for (std::size_t i = 0; i < 4; ++i) CHECK_FALSE(inst.predict_mask[i]);
    for (std::size_t i = 4; i < 7; ++i) CHECK(inst.predict_mask[i]);
    CHECK(inst.alignment == std::vector<int>{0, 1, 2});
    CHECK(engine::decode_outputs(inst, jv) == std::vector<std::string>{"NN", "VBZ", "NNS"});
}

TEST_CASE("single-label encoding masks only the final symbol") {
    auto jv = JointVocab::split(corpus::build_vocabulary({"Dog", "eats", "apple"}, 10),
                                corpus::build_vocabulary({"-1", "0", "1"}, 10));
    auto inst = engine::encode_instance(TaskFamily::UnalignedSingleLabel,
                                        jv.encode_input({"Dog", "eats", "apple"}),
                                        jv.encode_output({"0"}), false, jv.sep_id());
    REQUIRE(inst.sequence.size() == 5);
    CHECK(inst.masked_count() == 1);
    CHECK(inst.predict_mask.back());
    CHECK(engine::decode_outputs(inst, jv) == std::vector<std::string>{"0"});
}

TEST_CASE("sequence labeling with reversed input") {
    auto jv = JointVocab::split(corpus::build_vocabulary({"Dog", "eats", "apple"}, 10),
                                corpus::build_vocabulary({"chien", "mange", "pomme"}, 10));
    auto x = jv.encode_input({"Dog", "eats", "apple"});
    auto y = jv.encode_output({"chien", "mange", "pomme"});
    auto inst = engine::encode_instance(TaskFamily::UnalignedSequenceLabel, x, y, true,
                                        jv.sep_id());
    // apple eats Dog <sep> chien mange pomme
    CHECK(jv.decode(inst.sequence[0]) == "apple");
    CHECK(jv.decode(inst.sequence[1]) == "eats");
    CHECK(jv.decode(inst.sequence[2]) == "Dog");
    CHECK(inst.sequence[3] == jv.sep_id());
    CHECK(engine::decode_outputs(inst, jv) ==
          std::vector<std::string>{"chien", "mange", "pomme"});

    auto plain = engine::encode_instance(TaskFamily::UnalignedSequenceLabel, x, y, false,
                                         jv.sep_id());
    CHECK(plain.masked_count() == inst.masked_count());
    CHECK(engine::decode_outputs(plain, jv) == engine::decode_outputs(inst, jv));
}

TEST_CASE("aligned labeling with reversed input still points at the same token") {
    auto jv = pos_vocab();
    auto x = jv.encode_input({"dog", "eats", "bones"});
    auto y = jv.encode_output({"NN", "VBZ", "NNS"});
    auto inst = engine::encode_instance(TaskFamily::AlignedLabeling, x, y, true, jv.sep_id());
    CHECK(inst.alignment == std::vector<int>{2, 1, 0});
    for (std::size_t t = 0; t < 3; ++t)
        CHECK(inst.sequence[static_cast<std::size_t>(inst.alignment[t])] == x[t]);
}

TEST_CASE("prediction instances are output-only with an all-true mask") {
    auto jv = JointVocab::shared(corpus::build_vocabulary({"a", "b"}, 10));
    auto y = jv.encode_output({"a", "b", "a"});
    auto inst = engine::encode_instance(TaskFamily::Prediction, {}, y, false, jv.sep_id());
    CHECK(inst.sequence == y);
    CHECK(inst.masked_count() == 3);
    CHECK(engine::decode_outputs(inst, jv) == std::vector<std::string>{"a", "b", "a"});

    CHECK_THROWS_AS(engine::encode_instance(TaskFamily::Prediction, y, y, false, jv.sep_id()),
                    ConfigError);
}

TEST_CASE("family constraint violations are rejected") {
    auto jv = pos_vocab();
    auto x = jv.encode_input({"dog", "eats"});
    auto y3 = jv.encode_output({"NN", "VBZ", "NNS"});
    CHECK_THROWS_AS(
        engine::encode_instance(TaskFamily::AlignedLabeling, x, y3, false, jv.sep_id()),
        ConfigError);
    CHECK_THROWS_AS(
        engine::encode_instance(TaskFamily::UnalignedSingleLabel, x, y3, false, jv.sep_id()),
        ConfigError);
}

TEST_CASE("encode_instance is injective across x/y splits") {
    auto jv = JointVocab::shared(corpus::build_vocabulary({"a", "b", "c"}, 10));
    auto one = engine::encode_instance(TaskFamily::UnalignedSequenceLabel,
                                       jv.encode_input({"a", "b"}), jv.encode_output({"c"}),
                                       false, jv.sep_id());
    auto two = engine::encode_instance(TaskFamily::UnalignedSequenceLabel,
                                       jv.encode_input({"a"}), jv.encode_output({"b", "c"}),
                                       false, jv.sep_id());
    CHECK(one.sequence != two.sequence);
}

TEST_CASE("validate_dataset counts and rejects mixed families") {
    auto jv = pos_vocab();
    std::vector<EncodedInstance> ds;
    ds.push_back(engine::encode_instance(TaskFamily::AlignedLabeling,
                                         jv.encode_input({"dog", "eats", "bones"}),
                                         jv.encode_output({"NN", "VBZ", "NNS"}), false,
                                         jv.sep_id()));
    ds.push_back(engine::encode_instance(
        TaskFamily::AlignedLabeling, jv.encode_input({"dog", "eats", "bones", "dog", "eats"}),
        jv.encode_output({"NN", "VBZ", "NNS", "NN", "VBZ"}), false, jv.sep_id()));
    auto rep = engine::validate_dataset(ds, TaskFamily::AlignedLabeling);
    CHECK(rep.instances == 2);
    CHECK(rep.masked == 8);

    auto empty = engine::validate_dataset({}, TaskFamily::Prediction);
    CHECK(empty.instances == 0);
    CHECK(empty.masked == 0);

    ds.push_back(engine::encode_instance(TaskFamily::UnalignedSingleLabel,
                                         jv.encode_input({"dog"}), jv.encode_output({"NN"}),
                                         false, jv.sep_id()));
    CHECK_THROWS_AS(engine::validate_dataset(ds, TaskFamily::AlignedLabeling), ConfigError);
}

TEST_CASE("family names round-trip") {
    for (auto f : {TaskFamily::Prediction, TaskFamily::AlignedLabeling,
                   TaskFamily::UnalignedSingleLabel, TaskFamily::UnalignedSequenceLabel})
        CHECK(engine::parse_family(engine::family_name(f)) == f);
    CHECK_THROWS_AS(engine::parse_family("nonsense"), ConfigError);
}
