#ifndef TASKENT_CORPUS_HPP
#define TASKENT_CORPUS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taskent/numerics.hpp"

namespace taskent::corpus {

inline constexpr const char* kUnkSymbol = "<unk>";
inline constexpr const char* kSepSymbol = "<sep>";

// Bidirectional symbol<->id map.  Content symbols occupy the dense range
// [0, content_size); the reserved <unk> and <sep> symbols come last, so
// unk_id = content_size and sep_id = content_size + 1.
class Vocabulary {
  public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> content_symbols);

    int content_size() const { return static_cast<int>(symbols_.size()); }
    int size() const { return content_size() + 2; }
    int unk_id() const { return content_size(); }
    int sep_id() const { return content_size() + 1; }

    // id for a raw token, unk_id when out of vocabulary
    int encode_token(const std::string& raw) const;
    // symbol for any valid id, including the reserved ones
    const std::string& decode(int id) const;
    bool contains(const std::string& raw) const { return to_id_.count(raw) > 0; }

    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

  private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, int> to_id_;
    mutable std::string unk_str_ = kUnkSymbol;
    mutable std::string sep_str_ = kSepSymbol;
};

struct TokenStream {
    std::vector<int> ids;
    std::string source;  // file path or generator descriptor
};

// The max_size most frequent raw tokens become content symbols; ties break
// lexicographically; everything else maps to <unk>.
Vocabulary build_vocabulary(const std::vector<std::string>& raw_tokens, std::size_t max_size);

TokenStream encode(const Vocabulary& v, const std::vector<std::string>& raw_tokens,
                   const std::string& source_tag = "");

// Fraction of raw tokens that encode to a content symbol (not <unk>).
double coverage(const Vocabulary& v, const std::vector<std::string>& raw_tokens);

// Stationary finite-state source used as an analytic test oracle.
struct MarkovSource {
    std::size_t states = 0;
    num::Matrix transition;   // row-stochastic, states x states
    num::Vec stationary;      // pi with pi P = pi
    std::uint64_t seed = 0;

    // Validates P (rows sum to 1 within 1e-10, entries >= 0) and computes the
    // stationary distribution by damped power iteration.
    static MarkovSource from_transition(const num::Matrix& p, std::uint64_t seed);
};

// Initial state drawn from pi, then transitions from P.  Bit-reproducible
// for a fixed seed.
TokenStream generate_markov(const MarkovSource& src, std::size_t length);

// -sum_i pi_i sum_j P_ij log2 P_ij, with 0 log 0 = 0.
double entropy_rate(const MarkovSource& src);

// Second-order synthetic source: y_t = (y_{t-1} + y_{t-2} + d) mod K with d
// drawn from `noise`.  Every conditional row is a permutation of `noise`, so
// the analytic rate given two symbols of history is H(noise) while a
// single-symbol history carries no information (rate log2 K).
struct Order2Source {
    std::size_t symbols = 0;
    num::Vec noise;  // distribution over {0..K-1}
    std::uint64_t seed = 0;
};

TokenStream generate_order2(const Order2Source& src, std::size_t length);
double entropy_rate(const Order2Source& src);

struct TsvInstance {
    std::vector<std::string> input;
    std::vector<std::string> output;
    std::size_t line_no = 0;
};

// One instance per line; fields separated by exactly one tab, tokens by
// whitespace within a field.  field_count is 1 (pure prediction corpora:
// tokens land in `output`) or 2 (input TAB output).
std::vector<TsvInstance> load_tsv(const std::string& path, int field_count);

std::vector<std::string> split_whitespace(const std::string& line);

}  // namespace taskent::corpus

#endif
