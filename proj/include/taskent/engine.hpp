#ifndef TASKENT_ENGINE_HPP
#define TASKENT_ENGINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "taskent/corpus.hpp"

namespace taskent::engine {

enum class TaskFamily {
    Prediction,             // model P(Y); stream of outputs only
    AlignedLabeling,        // |X| = |Y|, one label per input token
    UnalignedSingleLabel,   // |Y| = 1 (classification)
    UnalignedSequenceLabel  // free-length output (translation-like)
};

std::string family_name(TaskFamily f);
TaskFamily parse_family(const std::string& name);

// Joint symbol space for a task.  Either one shared vocabulary for inputs
// and outputs, or two stacked ones: x content ids come first, then y content,
// then <unk> and <sep>.  The output-candidate range is always contiguous.
class JointVocab {
  public:
    static JointVocab shared(corpus::Vocabulary v);
    static JointVocab split(corpus::Vocabulary x, corpus::Vocabulary y);

    int size() const;
    int unk_id() const;
    int sep_id() const;
    bool is_shared() const { return !y_.has_value(); }

    int encode_input_token(const std::string& raw) const;
    int encode_output_token(const std::string& raw) const;
    std::vector<int> encode_input(const std::vector<std::string>& raw) const;
    std::vector<int> encode_output(const std::vector<std::string>& raw) const;
    const std::string& decode(int id) const;

    // Output-candidate id range for the scoring heads.  include_unk keeps
    // <unk> as a candidate (open output vocabularies); it sits immediately
    // after the output content block, so the range stays contiguous.
    int out_lo(bool include_unk) const;
    int out_hi(bool include_unk) const;

  private:
    corpus::Vocabulary x_;
    std::optional<corpus::Vocabulary> y_;
};

struct EncodedInstance {
    std::vector<int> sequence;       // over the joint vocabulary
    std::vector<char> predict_mask;  // same length; true exactly on Y positions
    std::vector<int> alignment;      // AlignedLabeling only: per-output index into sequence
    TaskFamily family = TaskFamily::Prediction;

    std::size_t masked_count() const;
};

// sequence = (reversed?) x ++ <sep> ++ y, mask true on y.  Prediction takes
// an empty x and yields y with an all-true mask and no separator.
EncodedInstance encode_instance(TaskFamily family, const std::vector<int>& x,
                                const std::vector<int>& y, bool reverse_input, int sep_id);

// Raw symbols at the masked positions, in order.
std::vector<std::string> decode_outputs(const EncodedInstance& inst, const JointVocab& v);

struct DatasetReport {
    std::size_t instances = 0;
    std::size_t symbols = 0;
    std::size_t masked = 0;
};

// Counts instances/symbols/mask positions; rejects mixed-family datasets.
DatasetReport validate_dataset(const std::vector<EncodedInstance>& instances, TaskFamily family);

}  // namespace taskent::engine

#endif
