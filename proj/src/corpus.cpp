#include "taskent/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "taskent/errors.hpp"
#include "taskent/rng.hpp"

namespace taskent::corpus {

Vocabulary::Vocabulary(std::vector<std::string> content_symbols)
    : symbols_(std::move(content_symbols)) {
    to_id_.reserve(symbols_.size());
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        auto [it, inserted] = to_id_.emplace(symbols_[i], static_cast<int>(i));
        if (!inserted) throw ConfigError("vocabulary: duplicate symbol '" + symbols_[i] + "'");
        if (symbols_[i] == kUnkSymbol || symbols_[i] == kSepSymbol)
            throw ConfigError("vocabulary: reserved symbol '" + symbols_[i] +
                              "' listed as content");
    }
}

int Vocabulary::encode_token(const std::string& raw) const {
    auto it = to_id_.find(raw);
    return it == to_id_.end() ? unk_id() : it->second;
}

const std::string& Vocabulary::decode(int id) const {
    if (id >= 0 && id < content_size()) return symbols_[static_cast<std::size_t>(id)];
    if (id == unk_id()) return unk_str_;
    if (id == sep_id()) return sep_str_;
    throw ConfigError("vocabulary: id " + std::to_string(id) + " out of range [0," +
                      std::to_string(size()) + ")");
}

void Vocabulary::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write vocabulary file: " + path);
        for (const auto& s : symbols_) out << s << "\n";
        out << kUnkSymbol << "\n" << kSepSymbol << "\n";
        if (!out) throw IoError("write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("rename failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read vocabulary file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    if (lines.size() < 2 || lines[lines.size() - 2] != kUnkSymbol ||
        lines[lines.size() - 1] != kSepSymbol) {
        throw ConfigError("vocabulary file " + path + " must end with lines '" +
                          kUnkSymbol + "' and '" + kSepSymbol + "'");
    }
    lines.resize(lines.size() - 2);
    return Vocabulary(std::move(lines));
}

Vocabulary build_vocabulary(const std::vector<std::string>& raw_tokens, std::size_t max_size) {
    if (max_size < 1) throw ConfigError("build_vocabulary: max_size must be >= 1");
    // std::map keeps the lexicographic order used for tie-breaking
    std::map<std::string, std::size_t> counts;
    for (const auto& t : raw_tokens) ++counts[t];

    std::vector<std::pair<std::string, std::size_t>> by_freq(counts.begin(), counts.end());
    std::stable_sort(by_freq.begin(), by_freq.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (by_freq.size() > max_size) by_freq.resize(max_size);

    std::vector<std::string> content;
    content.reserve(by_freq.size());
    for (auto& [sym, cnt] : by_freq) content.push_back(sym);
    return Vocabulary(std::move(content));
}

TokenStream encode(const Vocabulary& v, const std::vector<std::string>& raw_tokens,
                   const std::string& source_tag) {
    TokenStream s;
    s.source = source_tag;
    s.ids.reserve(raw_tokens.size());
    for (const auto& t : raw_tokens) s.ids.push_back(v.encode_token(t));
    return s;
}

double coverage(const Vocabulary& v, const std::vector<std::string>& raw_tokens) {
    if (raw_tokens.empty()) return 1.0;
    std::size_t hit = 0;
    for (const auto& t : raw_tokens)
        if (v.contains(t)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(raw_tokens.size());
}

namespace {

void check_row_stochastic(const num::Matrix& p) {
    if (p.rows == 0 || p.rows != p.cols)
        throw ConfigError("markov: transition matrix must be square and non-empty, got " +
                          std::to_string(p.rows) + "x" + std::to_string(p.cols));
    for (std::size_t r = 0; r < p.rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < p.cols; ++c) {
            if (p(r, c) < 0.0)
                throw ConfigError("markov: negative entry in transition row " + std::to_string(r));
            s += p(r, c);
        }
        if (std::abs(s - 1.0) > 1e-10)
            throw ConfigError("markov: transition row " + std::to_string(r) + " sums to " +
                              std::to_string(s) + ", expected 1");
    }
}

// sample from a discrete distribution by inverse CDF on one uniform draw
std::size_t sample_index(const num::Vec& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace

MarkovSource MarkovSource::from_transition(const num::Matrix& p, std::uint64_t seed) {
    check_row_stochastic(p);
    const std::size_t k = p.rows;

    // damped power iteration: pi <- pi (P + I) / 2 keeps the fixed point and
    // converges even for periodic chains
    num::Vec pi(k, 1.0 / static_cast<double>(k));
    for (int iter = 0; iter < 100000; ++iter) {
        num::Vec next(k, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) next[j] += pi[i] * p(i, j);
        double delta = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            next[j] = 0.5 * (next[j] + pi[j]);
            delta = std::max(delta, std::abs(next[j] - pi[j]));
        }
        pi = std::move(next);
        if (delta < 1e-14) break;
    }
    // verify pi P = pi
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += pi[i] * p(i, j);
        if (std::abs(s - pi[j]) > 1e-8)
            throw ConfigError("markov: stationary distribution did not converge");
    }

    MarkovSource src;
    src.states = k;
    src.transition = p;
    src.stationary = std::move(pi);
    src.seed = seed;
    return src;
}

TokenStream generate_markov(const MarkovSource& src, std::size_t length) {
    if (length < 1) throw ConfigError("generate_markov: length must be >= 1");
    if (src.states == 0) throw ConfigError("generate_markov: invalid source");
    Rng rng(src.seed);
    TokenStream s;
    s.source = "markov(K=" + std::to_string(src.states) + ",seed=" + std::to_string(src.seed) + ")";
    s.ids.reserve(length);

    std::size_t state = sample_index(src.stationary, rng.uniform01());
    s.ids.push_back(static_cast<int>(state));
    for (std::size_t t = 1; t < length; ++t) {
        num::Vec row(src.states);
        for (std::size_t c = 0; c < src.states; ++c) row[c] = src.transition(state, c);
        state = sample_index(row, rng.uniform01());
        s.ids.push_back(static_cast<int>(state));
    }
    return s;
}

double entropy_rate(const MarkovSource& src) {
    if (src.states == 0) throw ConfigError("entropy_rate: invalid source");
    double h = 0.0;
    for (std::size_t i = 0; i < src.states; ++i) {
        for (std::size_t j = 0; j < src.states; ++j) {
            const double p = src.transition(i, j);
            if (p > 0.0) h -= src.stationary[i] * p * std::log2(p);
        }
    }
    return h;
}

TokenStream generate_order2(const Order2Source& src, std::size_t length) {
    const std::size_t k = src.symbols;
    if (k < 2) throw ConfigError("generate_order2: need at least 2 symbols");
    if (src.noise.size() != k) throw ConfigError("generate_order2: noise size must equal K");
    double s = 0.0;
    for (double w : src.noise) {
        if (w < 0.0) throw ConfigError("generate_order2: negative noise weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-10) throw ConfigError("generate_order2: noise must sum to 1");
    if (length < 1) throw ConfigError("generate_order2: length must be >= 1");

    Rng rng(src.seed);
    TokenStream out;
    out.source = "order2(K=" + std::to_string(k) + ",seed=" + std::to_string(src.seed) + ")";
    out.ids.reserve(length);

    // burn-in from a uniform start so the emitted stream is near-stationary
    std::size_t a = rng.below(k), b = rng.below(k);
    for (int warm = 0; warm < 64; ++warm) {
        std::size_t d = sample_index(src.noise, rng.uniform01());
        std::size_t c = (a + b + d) % k;
        a = b;
        b = c;
    }
    for (std::size_t t = 0; t < length; ++t) {
        std::size_t d = sample_index(src.noise, rng.uniform01());
        std::size_t c = (a + b + d) % k;
        out.ids.push_back(static_cast<int>(c));
        a = b;
        b = c;
    }
    return out;
}

double entropy_rate(const Order2Source& src) {
    double h = 0.0;
    for (double w : src.noise)
        if (w > 0.0) h -= w * std::log2(w);
    return h;
}

std::vector<std::string> split_whitespace(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<TsvInstance> load_tsv(const std::string& path, int field_count) {
    if (field_count != 1 && field_count != 2)
        throw ConfigError("load_tsv: field schema must be 1 or 2, got " +
                          std::to_string(field_count));
    std::ifstream in(path);
    if (!in) throw IoError("cannot read corpus file: " + path);

    std::vector<TsvInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (static_cast<int>(fields.size()) != field_count)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(field_count) + " tab-separated field(s), found " +
                              std::to_string(fields.size()));
        TsvInstance inst;
        inst.line_no = line_no;
        if (field_count == 1) {
            inst.output = split_whitespace(fields[0]);
        } else {
            inst.input = split_whitespace(fields[0]);
            inst.output = split_whitespace(fields[1]);
        }
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace taskent::corpus
