#include "taskent/engine.hpp"

#include <algorithm>

#include "taskent/errors.hpp"

namespace taskent::engine {

std::string family_name(TaskFamily f) {
    switch (f) {
        case TaskFamily::Prediction: return "prediction";
        case TaskFamily::AlignedLabeling: return "aligned";
        case TaskFamily::UnalignedSingleLabel: return "single_label";
        case TaskFamily::UnalignedSequenceLabel: return "sequence_label";
    }
    throw ConfigError("unknown task family");
}

TaskFamily parse_family(const std::string& name) {
    if (name == "prediction") return TaskFamily::Prediction;
    if (name == "aligned") return TaskFamily::AlignedLabeling;
    if (name == "single_label") return TaskFamily::UnalignedSingleLabel;
    if (name == "sequence_label") return TaskFamily::UnalignedSequenceLabel;
    throw ConfigError("unknown task family '" + name +
                      "' (expected prediction|aligned|single_label|sequence_label)");
}

JointVocab JointVocab::shared(corpus::Vocabulary v) {
    JointVocab jv;
    jv.x_ = std::move(v);
    return jv;
}

JointVocab JointVocab::split(corpus::Vocabulary x, corpus::Vocabulary y) {
    JointVocab jv;
    jv.x_ = std::move(x);
    jv.y_ = std::move(y);
    return jv;
}

int JointVocab::size() const {
    return is_shared() ? x_.size() : x_.content_size() + y_->content_size() + 2;
}

int JointVocab::unk_id() const {
    return is_shared() ? x_.unk_id() : x_.content_size() + y_->content_size();
}

int JointVocab::sep_id() const { return unk_id() + 1; }

int JointVocab::encode_input_token(const std::string& raw) const {
    const int id = x_.encode_token(raw);
    return id == x_.unk_id() ? unk_id() : id;
}

int JointVocab::encode_output_token(const std::string& raw) const {
    if (is_shared()) return x_.encode_token(raw);
    const int id = y_->encode_token(raw);
    return id == y_->unk_id() ? unk_id() : id + x_.content_size();
}

std::vector<int> JointVocab::encode_input(const std::vector<std::string>& raw) const {
    std::vector<int> out;
    out.reserve(raw.size());
    for (const auto& t : raw) out.push_back(encode_input_token(t));
    return out;
}

std::vector<int> JointVocab::encode_output(const std::vector<std::string>& raw) const {
    std::vector<int> out;
    out.reserve(raw.size());
    for (const auto& t : raw) out.push_back(encode_output_token(t));
    return out;
}

const std::string& JointVocab::decode(int id) const {
    if (is_shared()) return x_.decode(id);
    if (id < x_.content_size()) return x_.decode(id);
    if (id < x_.content_size() + y_->content_size()) return y_->decode(id - x_.content_size());
    if (id == unk_id()) return x_.decode(x_.unk_id());
    if (id == sep_id()) return x_.decode(x_.sep_id());
    throw ConfigError("joint vocabulary: id " + std::to_string(id) + " out of range");
}

int JointVocab::out_lo(bool) const { return is_shared() ? 0 : x_.content_size(); }

int JointVocab::out_hi(bool include_unk) const {
    return unk_id() + (include_unk ? 1 : 0);
}

std::size_t EncodedInstance::masked_count() const {
    return static_cast<std::size_t>(std::count(predict_mask.begin(), predict_mask.end(), 1));
}

EncodedInstance encode_instance(TaskFamily family, const std::vector<int>& x,
                                const std::vector<int>& y, bool reverse_input, int sep_id) {
    if (y.empty()) throw ConfigError("encode_instance: empty output sequence");

    EncodedInstance inst;
    inst.family = family;

    if (family == TaskFamily::Prediction) {
        if (!x.empty())
            throw ConfigError("encode_instance: prediction instances take no input stream");
        inst.sequence = y;
        inst.predict_mask.assign(y.size(), 1);
        return inst;
    }

    if (family == TaskFamily::AlignedLabeling && x.size() != y.size())
        throw ConfigError("encode_instance: aligned labeling requires |X| = |Y|, got " +
                          std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (family == TaskFamily::UnalignedSingleLabel && y.size() != 1)
        throw ConfigError("encode_instance: single-label instances require |Y| = 1, got " +
                          std::to_string(y.size()));

    inst.sequence = x;
    if (reverse_input) std::reverse(inst.sequence.begin(), inst.sequence.end());
    inst.sequence.push_back(sep_id);
    inst.sequence.insert(inst.sequence.end(), y.begin(), y.end());

    inst.predict_mask.assign(inst.sequence.size(), 0);
    for (std::size_t i = x.size() + 1; i < inst.sequence.size(); ++i) inst.predict_mask[i] = 1;

    if (family == TaskFamily::AlignedLabeling) {
        inst.alignment.resize(y.size());
        const int n = static_cast<int>(x.size());
        for (int t = 0; t < n; ++t) inst.alignment[static_cast<std::size_t>(t)] =
            reverse_input ? n - 1 - t : t;
    }
    return inst;
}

std::vector<std::string> decode_outputs(const EncodedInstance& inst, const JointVocab& v) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < inst.sequence.size(); ++i)
        if (inst.predict_mask[i]) out.push_back(v.decode(inst.sequence[i]));
    return out;
}

DatasetReport validate_dataset(const std::vector<EncodedInstance>& instances, TaskFamily family) {
    DatasetReport rep;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (inst.family != family)
            throw ConfigError("dataset: instance " + std::to_string(i) + " has family " +
                              family_name(inst.family) + ", expected " + family_name(family));
        if (inst.predict_mask.size() != inst.sequence.size())
            throw ConfigError("dataset: instance " + std::to_string(i) + " mask/sequence mismatch");
        ++rep.instances;
        rep.symbols += inst.sequence.size();
        rep.masked += inst.masked_count();
    }
    return rep;
}

}  // namespace taskent::engine
