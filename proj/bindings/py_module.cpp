#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "taskent/cli.hpp"
#include "taskent/corpus.hpp"
#include "taskent/engine.hpp"
#include "taskent/entropy.hpp"
#include "taskent/errors.hpp"
#include "taskent/numerics.hpp"
#include "taskent/trainer.hpp"

namespace py = pybind11;
using namespace taskent;

namespace {

num::Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ConfigError("matrix: no rows");
    num::Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols) throw ConfigError("matrix: ragged rows");
        for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_taskent, m) {
    m.doc() = "Cross-entropy measurement engine for sequence tasks";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<IoError>(m, "IoError");
    py::register_exception<DivergenceError>(m, "DivergenceError");

    // numerics
    m.def("softmax", &num::softmax, py::arg("logits"));
    m.def("log_sum_exp", &num::log_sum_exp, py::arg("values"));

    // exact entropies
    m.def("shannon_entropy", &entropy::shannon_entropy, py::arg("p"));
    m.def("cross_entropy", &entropy::cross_entropy, py::arg("p"), py::arg("q"));
    m.def("kl_divergence", &entropy::kl_divergence, py::arg("p"), py::arg("q"));
    m.def(
        "conditional_entropy",
        [](const std::vector<std::vector<double>>& joint) {
            return entropy::conditional_entropy({matrix_from_rows(joint)});
        },
        py::arg("joint"), "H(Y|X) of a joint table given as rows over x");

    // vocabulary
    py::class_<corpus::Vocabulary>(m, "Vocabulary")
        .def_property_readonly("size", &corpus::Vocabulary::size)
        .def_property_readonly("content_size", &corpus::Vocabulary::content_size)
        .def_property_readonly("unk_id", &corpus::Vocabulary::unk_id)
        .def_property_readonly("sep_id", &corpus::Vocabulary::sep_id)
        .def("encode_token", &corpus::Vocabulary::encode_token)
        .def("decode", &corpus::Vocabulary::decode)
        .def("save", &corpus::Vocabulary::save)
        .def_static("load", &corpus::Vocabulary::load);
    m.def("build_vocabulary", &corpus::build_vocabulary, py::arg("tokens"), py::arg("max_size"));
    m.def(
        "encode",
        [](const corpus::Vocabulary& v, const std::vector<std::string>& tokens) {
            return corpus::encode(v, tokens).ids;
        },
        py::arg("vocab"), py::arg("tokens"));

    // markov oracles
    m.def(
        "markov_entropy_rate",
        [](const std::vector<std::vector<double>>& transition) {
            return corpus::entropy_rate(
                corpus::MarkovSource::from_transition(matrix_from_rows(transition), 0));
        },
        py::arg("transition"));
    m.def(
        "generate_markov",
        [](const std::vector<std::vector<double>>& transition, std::size_t length,
           std::uint64_t seed) {
            return corpus::generate_markov(
                       corpus::MarkovSource::from_transition(matrix_from_rows(transition), seed),
                       length)
                .ids;
        },
        py::arg("transition"), py::arg("length"), py::arg("seed"));

    // n-gram bound
    m.def(
        "ngram_cross_entropy",
        [](const std::vector<int>& train, const std::vector<int>& heldout, int order, double alpha,
           int vocab_size) {
            corpus::TokenStream ts{train, "train"}, hs{heldout, "heldout"};
            return entropy::ngram_cross_entropy(entropy::fit_ngram(ts, order, alpha, vocab_size),
                                                hs);
        },
        py::arg("train"), py::arg("heldout"), py::arg("order"), py::arg("alpha") = 1.0,
        py::arg("vocab_size") = 0);

    // task encoding
    py::enum_<engine::TaskFamily>(m, "TaskFamily")
        .value("Prediction", engine::TaskFamily::Prediction)
        .value("AlignedLabeling", engine::TaskFamily::AlignedLabeling)
        .value("UnalignedSingleLabel", engine::TaskFamily::UnalignedSingleLabel)
        .value("UnalignedSequenceLabel", engine::TaskFamily::UnalignedSequenceLabel);
    py::class_<engine::EncodedInstance>(m, "EncodedInstance")
        .def_readonly("sequence", &engine::EncodedInstance::sequence)
        .def_property_readonly("predict_mask",
                               [](const engine::EncodedInstance& inst) {
                                   std::vector<bool> mask(inst.predict_mask.begin(),
                                                          inst.predict_mask.end());
                                   return mask;
                               })
        .def_readonly("alignment", &engine::EncodedInstance::alignment)
        .def_readonly("family", &engine::EncodedInstance::family);
    m.def("encode_instance", &engine::encode_instance, py::arg("family"), py::arg("x"),
          py::arg("y"), py::arg("reverse_input"), py::arg("sep_id"));

    // experiment front ends (same backends as the CLI verbs)
    m.def(
        "train_experiment",
        [](const std::string& spec_path, const cli::KeyValues& overrides) {
            auto model = cli::cmd_train(spec_path, overrides);
            py::dict out;
            out["config_hash"] = cli::hash_hex(model.config_hash);
            out["seed"] = model.seed;
            out["vocab_size"] = model.params.vocab_size();
            return out;
        },
        py::arg("spec_path"), py::arg("overrides") = cli::KeyValues{});
    m.def(
        "eval_experiment",
        [](const std::string& checkpoint, const std::string& corpus_path,
           const std::string& spec_path, const std::string& report_path) {
            auto rep = cli::cmd_eval(checkpoint, corpus_path, spec_path, {}, report_path, false);
            py::dict out;
            out["task"] = rep.task;
            out["family"] = rep.family;
            out["dataset"] = rep.dataset;
            out["symbols"] = rep.symbols;
            out["bits_per_symbol"] = rep.bits_per_symbol;
            return out;
        },
        py::arg("checkpoint"), py::arg("corpus"), py::arg("spec"), py::arg("report"));
    m.def("run_all", &cli::cmd_run_all, py::arg("out_dir"), py::arg("seed") = 1);
}
