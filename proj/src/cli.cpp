#include "taskent/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "taskent/errors.hpp"
#include "taskent/rng.hpp"

namespace fs = std::filesystem;

namespace taskent::cli {

// ---------------------------------------------------------------- key-values

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.resize(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

KeyValues load_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str(), path);
}

void apply_env_overrides(KeyValues& kv, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
        std::string env_name = "TASKENT_";
        for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(env_name.c_str())) kv[key] = v;
    }
}

std::uint64_t config_hash(const KeyValues& kv) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : kv) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write file: " + path);
        out << content;
        if (!out) throw IoError("write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("rename failed: " + path);
}

// ------------------------------------------------------------ spec resolution

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "task",        "family",     "train",      "heldout",    "vocab",
        "vocab_x",     "vocab_y",    "reverse_input", "out_includes_unk", "scorer",
        "field",       "pretrained", "checkpoint", "trainlog",   "dataset",
        "seed",        "epochs",     "lr",         "batch",      "clip",
        "init_range",  "hidden_dim", "embed_dim",  "aligned_rows"};
    return keys;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const auto out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::string resolve_path(const std::string& value, const fs::path& base_dir) {
    if (value.empty()) return value;
    fs::path p(value);
    if (p.is_absolute()) return p.string();
    return (base_dir / p).lexically_normal().string();
}

std::string basename_of(const std::string& path) { return fs::path(path).filename().string(); }

}  // namespace

ExperimentSpec resolve_spec(const std::string& spec_path, const KeyValues& flag_overrides) {
    KeyValues kv = load_key_value_file(spec_path);
    for (const auto& [k, v] : kv)
        if (std::find(known_keys().begin(), known_keys().end(), k) == known_keys().end())
            throw ConfigError(spec_path + ": unknown key '" + k + "'");
    apply_env_overrides(kv, known_keys());
    for (const auto& [k, v] : flag_overrides) {
        if (std::find(known_keys().begin(), known_keys().end(), k) == known_keys().end())
            throw ConfigError("override: unknown key '" + k + "'");
        kv[k] = v;
    }

    if (!kv.count("family")) throw ConfigError(spec_path + ": missing required key 'family'");
    const auto family = engine::parse_family(kv.at("family"));

    // family-dependent defaults, made explicit so the hash is self-describing
    auto set_default = [&kv](const std::string& k, const std::string& v) {
        if (!kv.count(k) || kv.at(k).empty()) kv[k] = v;
    };
    set_default("reverse_input",
                family == engine::TaskFamily::UnalignedSequenceLabel ? "true" : "false");
    set_default("out_includes_unk", (family == engine::TaskFamily::Prediction ||
                                     family == engine::TaskFamily::UnalignedSequenceLabel)
                                        ? "true"
                                        : "false");
    set_default("scorer",
                family == engine::TaskFamily::AlignedLabeling ? "aligned_tanh" : "dot");
    set_default("seed", "1");
    set_default("epochs", "4");
    set_default("lr", "0.5");
    set_default("batch", "32");
    set_default("clip", "5");
    set_default("init_range", "0.1");
    set_default("hidden_dim", "64");
    set_default("embed_dim", "64");
    set_default("aligned_rows", "0");
    if (!kv.count("task")) throw ConfigError(spec_path + ": missing required key 'task'");

    ExperimentSpec spec;
    spec.hash = config_hash(kv);
    spec.task = kv.at("task");
    if (spec.task.find(',') != std::string::npos)
        throw ConfigError("task name may not contain a comma: " + spec.task);
    spec.family = family;

    const fs::path base = fs::path(spec_path).parent_path();
    auto path_of = [&](const std::string& key) {
        return kv.count(key) ? resolve_path(kv.at(key), base) : std::string();
    };
    spec.train_path = path_of("train");
    spec.heldout_path = path_of("heldout");
    spec.vocab_path = path_of("vocab");
    spec.vocab_x_path = path_of("vocab_x");
    spec.vocab_y_path = path_of("vocab_y");
    spec.pretrained_path = path_of("pretrained");
    spec.checkpoint_path = path_of("checkpoint");
    spec.trainlog_path = path_of("trainlog");

    if (spec.vocab_path.empty() == spec.vocab_x_path.empty())
        throw ConfigError(spec_path +
                          ": exactly one of 'vocab' or 'vocab_x'+'vocab_y' must be given");
    if (!spec.vocab_x_path.empty() && spec.vocab_y_path.empty())
        throw ConfigError(spec_path + ": 'vocab_x' requires 'vocab_y'");
    if (family == engine::TaskFamily::Prediction && spec.split_vocab())
        throw ConfigError(spec_path + ": prediction tasks use a shared vocabulary");

    spec.reverse_input = parse_bool("reverse_input", kv.at("reverse_input"));
    spec.out_includes_unk = parse_bool("out_includes_unk", kv.at("out_includes_unk"));
    spec.scorer = heads::parse_scorer(kv.at("scorer"));
    if (kv.count("field")) {
        spec.field = kv.at("field");
        if (!spec.field.empty() && spec.field != "input" && spec.field != "output")
            throw ConfigError(spec_path + ": field must be input|output");
        if (!spec.field.empty() && family != engine::TaskFamily::Prediction)
            throw ConfigError(spec_path + ": 'field' only applies to prediction tasks");
    }
    spec.dataset_tag = kv.count("dataset") ? kv.at("dataset")
                                           : basename_of(!spec.heldout_path.empty()
                                                             ? spec.heldout_path
                                                             : spec.train_path);
    if (spec.dataset_tag.find(',') != std::string::npos)
        throw ConfigError("dataset tag may not contain a comma: " + spec.dataset_tag);

    spec.config.seed = parse_u64("seed", kv.at("seed"));
    spec.config.epochs = parse_u64("epochs", kv.at("epochs"));
    spec.config.initial_lr = parse_real("lr", kv.at("lr"));
    spec.config.batch_size = parse_u64("batch", kv.at("batch"));
    spec.config.clip_threshold = parse_real("clip", kv.at("clip"));
    spec.config.init_range = parse_real("init_range", kv.at("init_range"));
    spec.config.hidden_dim = parse_u64("hidden_dim", kv.at("hidden_dim"));
    spec.config.embed_dim = parse_u64("embed_dim", kv.at("embed_dim"));
    spec.config.aligned_rows = parse_u64("aligned_rows", kv.at("aligned_rows"));
    spec.config.validate();
    return spec;
}

engine::JointVocab load_joint_vocab(const ExperimentSpec& spec) {
    if (spec.split_vocab())
        return engine::JointVocab::split(corpus::Vocabulary::load(spec.vocab_x_path),
                                         corpus::Vocabulary::load(spec.vocab_y_path));
    return engine::JointVocab::shared(corpus::Vocabulary::load(spec.vocab_path));
}

std::vector<engine::EncodedInstance> load_dataset(const std::string& corpus_path,
                                                  const ExperimentSpec& spec,
                                                  const engine::JointVocab& vocab) {
    const bool prediction = spec.family == engine::TaskFamily::Prediction;
    const int fields = prediction && spec.field.empty() ? 1 : 2;
    auto rows = corpus::load_tsv(corpus_path, fields);

    std::vector<engine::EncodedInstance> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<int> x, y;
        if (prediction) {
            const auto& toks = spec.field == "input" ? row.input : row.output;
            y = vocab.encode_output(toks);
        } else {
            x = vocab.encode_input(row.input);
            y = vocab.encode_output(row.output);
        }
        try {
            out.push_back(engine::encode_instance(spec.family, x, y, spec.reverse_input,
                                                  vocab.sep_id()));
        } catch (const ConfigError& e) {
            throw ConfigError(corpus_path + ":" + std::to_string(row.line_no) + ": " + e.what());
        }
    }
    return out;
}

// ------------------------------------------------------------------ commands

void cmd_vocab(const std::string& corpus_path, const std::string& field, std::size_t max_size,
               const std::string& out_path) {
    if (field != "all" && field != "input" && field != "output")
        throw ConfigError("vocab: field must be all|input|output");

    // sniff the schema: any tab on the first data line means two fields
    std::ifstream probe(corpus_path);
    if (!probe) throw IoError("cannot read corpus file: " + corpus_path);
    std::string first;
    while (std::getline(probe, first) && first.empty()) {
    }
    const int fields = first.find('\t') != std::string::npos ? 2 : 1;
    if (fields == 1 && field != "all" && field != "output")
        throw ConfigError("vocab: field=" + field + " needs a two-field corpus");

    auto rows = corpus::load_tsv(corpus_path, fields);
    std::vector<std::string> tokens;
    for (const auto& row : rows) {
        if (field != "output")
            tokens.insert(tokens.end(), row.input.begin(), row.input.end());
        if (field != "input")
            tokens.insert(tokens.end(), row.output.begin(), row.output.end());
    }
    auto vocab = corpus::build_vocabulary(tokens, max_size);
    vocab.save(out_path);
    std::cout << "vocab: " << out_path << " size=" << vocab.size()
              << " (content=" << vocab.content_size() << ") coverage="
              << format_double(100.0 * corpus::coverage(vocab, tokens)) << "%\n";
}

namespace {

std::string trainlog_csv(const train::TrainLog& log, const ExperimentSpec& spec,
                         std::size_t masked_symbols) {
    std::ostringstream out;
    out << "epoch,lr,train_bits_per_symbol,heldout_bits_per_symbol,train_corpus,symbols,seed,"
           "config_hash\n";
    for (const auto& e : log) {
        out << e.epoch << "," << format_double(e.lr) << ","
            << format_double(e.train_bits_per_symbol) << ","
            << format_double(e.heldout_bits_per_symbol) << "," << basename_of(spec.train_path)
            << "," << masked_symbols << "," << spec.config.seed << "," << hash_hex(spec.hash)
            << "\n";
    }
    return out.str();
}

}  // namespace

Model cmd_train(const std::string& spec_path, const KeyValues& flag_overrides) {
    const ExperimentSpec spec = resolve_spec(spec_path, flag_overrides);
    if (spec.train_path.empty()) throw ConfigError(spec_path + ": missing required key 'train'");
    if (spec.checkpoint_path.empty())
        throw ConfigError(spec_path + ": missing required key 'checkpoint'");

    const auto vocab = load_joint_vocab(spec);
    auto dataset = load_dataset(spec.train_path, spec, vocab);
    auto report = engine::validate_dataset(dataset, spec.family);

    std::vector<engine::EncodedInstance> heldout;
    if (!spec.heldout_path.empty()) heldout = load_dataset(spec.heldout_path, spec, vocab);

    train::PretrainedEmbeddings pretrained;
    const bool with_pretrained = !spec.pretrained_path.empty();
    if (with_pretrained)
        pretrained = train::load_pretrained(spec.pretrained_path, spec.config.embed_dim);

    Model model = train::init_parameters(spec.config, vocab, spec.family, spec.scorer,
                                         vocab.out_lo(spec.out_includes_unk),
                                         vocab.out_hi(spec.out_includes_unk),
                                         with_pretrained ? &pretrained : nullptr);
    model.config_hash = spec.hash;

    std::cout << "train: task=" << spec.task << " family=" << engine::family_name(spec.family)
              << " instances=" << report.instances << " masked=" << report.masked
              << " vocab=" << vocab.size() << " candidates=" << model.head.candidates() << "\n";

    auto log = train::train(spec.config, dataset, model, heldout.empty() ? nullptr : &heldout);
    for (const auto& e : log) {
        std::cout << "  epoch " << e.epoch << ": lr=" << format_double(e.lr)
                  << " train=" << format_double(e.train_bits_per_symbol) << " bits/sym";
        if (!std::isnan(e.heldout_bits_per_symbol))
            std::cout << " heldout=" << format_double(e.heldout_bits_per_symbol) << " bits/sym";
        std::cout << " (" << format_double(e.wall_seconds) << "s)\n";
    }

    save_checkpoint(model, spec.checkpoint_path);
    const std::string log_path = spec.trainlog_path.empty()
                                     ? spec.checkpoint_path + ".trainlog.csv"
                                     : spec.trainlog_path;
    write_text_file(log_path, trainlog_csv(log, spec, report.masked));
    return model;
}

void write_report_csv(const entropy::EntropyReport& rep, const std::string& path, bool append) {
    const bool exists = fs::exists(path);
    std::ostringstream row;
    row << rep.task << "," << rep.family << "," << rep.dataset << "," << rep.symbols << ","
        << format_double(rep.bits_per_symbol) << "," << rep.seed << "," << hash_hex(rep.config_hash)
        << "\n";
    static const char* header = "task,family,dataset,symbols,bits_per_symbol,seed,config_hash\n";
    if (append && exists) {
        std::ofstream out(path, std::ios::app);
        if (!out) throw IoError("cannot append report: " + path);
        out << row.str();
        if (!out) throw IoError("write failed: " + path);
    } else {
        write_text_file(path, std::string(header) + row.str());
    }
}

std::vector<entropy::EntropyReport> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read report: " + path);
    std::vector<entropy::EntropyReport> out;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            auto pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (cells.size() != 7)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 7 columns, found " + std::to_string(cells.size()));
        entropy::EntropyReport rep;
        rep.task = cells[0];
        rep.family = cells[1];
        rep.dataset = cells[2];
        rep.symbols = parse_u64("symbols", cells[3]);
        rep.bits_per_symbol = parse_real("bits_per_symbol", cells[4]);
        rep.seed = parse_u64("seed", cells[5]);
        rep.config_hash = std::stoull(cells[6], nullptr, 16);
        out.push_back(std::move(rep));
    }
    return out;
}

entropy::EntropyReport cmd_eval(const std::string& checkpoint_path, const std::string& corpus_path,
                                const std::string& spec_path, const KeyValues& flag_overrides,
                                const std::string& report_path, bool append) {
    const ExperimentSpec spec = resolve_spec(spec_path, flag_overrides);
    const auto vocab = load_joint_vocab(spec);
    Model model = load_checkpoint(checkpoint_path);

    if (model.family != spec.family)
        throw ConfigError("eval: checkpoint family " + engine::family_name(model.family) +
                          " does not match spec family " + engine::family_name(spec.family));
    if (static_cast<int>(model.params.vocab_size()) != vocab.size())
        throw ConfigError("eval: checkpoint vocabulary size " +
                          std::to_string(model.params.vocab_size()) +
                          " does not match vocabulary files (" + std::to_string(vocab.size()) + ")");
    if (model.head.out_lo != vocab.out_lo(spec.out_includes_unk) ||
        model.head.out_hi != vocab.out_hi(spec.out_includes_unk))
        throw ConfigError("eval: checkpoint output range [" + std::to_string(model.head.out_lo) +
                          "," + std::to_string(model.head.out_hi) +
                          ") does not match the vocabulary/spec");

    auto dataset = load_dataset(corpus_path, spec, vocab);
    auto rep = entropy::model_cross_entropy(model.params, model.head, dataset);
    rep.task = spec.task;
    rep.family = engine::family_name(model.family);
    rep.dataset = basename_of(corpus_path);
    rep.seed = model.seed;
    rep.config_hash = model.config_hash;

    write_report_csv(rep, report_path, append);
    std::cout << "eval: task=" << rep.task << " dataset=" << rep.dataset
              << " symbols=" << rep.symbols
              << " bits/symbol=" << format_double(rep.bits_per_symbol) << "\n";
    return rep;
}

std::vector<BaselineRow> cmd_baseline(const std::string& train_path,
                                      const std::string& heldout_path,
                                      const std::vector<int>& orders, double alpha,
                                      std::uint64_t seed, const std::string& report_path) {
    if (orders.empty()) throw ConfigError("baseline: orders list is empty");

    auto load_stream = [](const std::string& path) {
        auto rows = corpus::load_tsv(path, 1);
        std::vector<std::string> tokens;
        for (const auto& r : rows) tokens.insert(tokens.end(), r.output.begin(), r.output.end());
        return tokens;
    };
    const auto train_tokens = load_stream(train_path);
    const auto heldout_tokens = load_stream(heldout_path);
    if (train_tokens.empty()) throw ConfigError("baseline: empty training stream");

    auto vocab = corpus::build_vocabulary(train_tokens, train_tokens.size());
    const int v_classes = vocab.content_size() + 1;  // content plus <unk>
    auto train_stream = corpus::encode(vocab, train_tokens, basename_of(train_path));
    auto heldout_stream = corpus::encode(vocab, heldout_tokens, basename_of(heldout_path));

    KeyValues id;
    id["train"] = basename_of(train_path);
    id["heldout"] = basename_of(heldout_path);
    id["alpha"] = format_double(alpha);
    id["seed"] = std::to_string(seed);
    {
        std::string olist;
        for (int o : orders) olist += (olist.empty() ? "" : " ") + std::to_string(o);
        id["orders"] = olist;
    }
    const auto hash = config_hash(id);

    std::vector<BaselineRow> out;
    std::ostringstream csv;
    csv << "order,bits_per_symbol,corpus,symbols,alpha,seed,config_hash\n";
    for (int order : orders) {
        auto model = entropy::fit_ngram(train_stream, order, alpha, v_classes);
        BaselineRow row;
        row.order = order;
        row.bits_per_symbol = entropy::ngram_cross_entropy(model, heldout_stream);
        row.symbols = heldout_stream.ids.size();
        out.push_back(row);
        csv << order << "," << format_double(row.bits_per_symbol) << ","
            << basename_of(heldout_path) << "," << row.symbols << "," << format_double(alpha)
            << "," << seed << "," << hash_hex(hash) << "\n";
        std::cout << "baseline: F_" << order << " = " << format_double(row.bits_per_symbol)
                  << " bits/symbol\n";
    }
    if (!report_path.empty()) write_text_file(report_path, csv.str());
    return out;
}

std::vector<entropy::EntropyReport> cmd_compare(const std::vector<std::string>& report_paths,
                                                const std::string& out_path) {
    if (report_paths.empty()) throw ConfigError("compare: need at least one report");
    std::vector<entropy::EntropyReport> rows;
    for (const auto& p : report_paths) {
        auto part = read_report_csv(p);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::set<std::string> seen;
    for (const auto& r : rows)
        if (!seen.insert(r.task).second)
            throw ConfigError("compare: duplicate task name '" + r.task + "'");

    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.bits_per_symbol != b.bits_per_symbol) return a.bits_per_symbol > b.bits_per_symbol;
        return a.task < b.task;
    });

    std::ostringstream csv;
    csv << "task,family,dataset,symbols,bits_per_symbol,seed,config_hash\n";
    std::cout << "task                      family          dataset                 bits/symbol\n";
    for (const auto& r : rows) {
        csv << r.task << "," << r.family << "," << r.dataset << "," << r.symbols << ","
            << format_double(r.bits_per_symbol) << "," << r.seed << "," << hash_hex(r.config_hash)
            << "\n";
        char line[160];
        std::snprintf(line, sizeof line, "%-25s %-15s %-23s %s", r.task.c_str(), r.family.c_str(),
                      r.dataset.c_str(), format_double(r.bits_per_symbol).c_str());
        std::cout << line << "\n";
    }
    if (!out_path.empty()) write_text_file(out_path, csv.str());
    return rows;
}

// --------------------------------------------------------------------- synth

namespace {

num::Matrix parse_transition(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream ss(text);
    std::string row_text;
    while (std::getline(ss, row_text, ';')) {
        std::vector<double> row;
        std::istringstream rs(row_text);
        std::string cell;
        while (std::getline(rs, cell, ',')) row.push_back(parse_real("transition", cell));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("synth: empty transition matrix");
    num::Matrix p(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != p.cols)
            throw ConfigError("synth: ragged transition matrix row " + std::to_string(r));
        for (std::size_t c = 0; c < p.cols; ++c) p(r, c) = rows[r][c];
    }
    return p;
}

num::Vec parse_weights(const std::string& text) {
    num::Vec w;
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) w.push_back(parse_real("noise", cell));
    return w;
}

std::string stream_to_tsv(const corpus::TokenStream& stream, const std::string& prefix,
                          std::size_t line_len) {
    std::ostringstream out;
    for (std::size_t i = 0; i < stream.ids.size(); ++i) {
        if (i % line_len != 0) out << ' ';
        out << prefix << stream.ids[i];
        if ((i + 1) % line_len == 0 || i + 1 == stream.ids.size()) out << '\n';
    }
    return out.str();
}

}  // namespace

void cmd_synth(const SynthSpec& spec, const std::string& out_prefix) {
    std::ostringstream tsv;
    KeyValues meta;
    meta["kind"] = spec.kind;
    meta["seed"] = std::to_string(spec.seed);

    if (spec.kind == "markov") {
        const std::string transition =
            spec.transition.empty() ? "0.9,0.1;0.1,0.9" : spec.transition;
        auto p = parse_transition(transition);
        auto src = corpus::MarkovSource::from_transition(p, spec.seed);
        auto stream = corpus::generate_markov(src, spec.length);
        tsv << stream_to_tsv(stream, "s", spec.line_length);
        meta["states"] = std::to_string(src.states);
        meta["length"] = std::to_string(spec.length);
        meta["line_length"] = std::to_string(spec.line_length);
        meta["transition"] = transition;
        meta["entropy_rate_bits"] = format_double(corpus::entropy_rate(src));
    } else if (spec.kind == "markov2") {
        corpus::Order2Source src;
        src.symbols = spec.symbols;
        src.noise = spec.noise.empty() ? num::Vec{0.7, 0.2, 0.05, 0.05} : parse_weights(spec.noise);
        src.seed = spec.seed;
        auto stream = corpus::generate_order2(src, spec.length);
        tsv << stream_to_tsv(stream, "s", spec.line_length);
        meta["states"] = std::to_string(src.symbols);
        meta["length"] = std::to_string(spec.length);
        meta["line_length"] = std::to_string(spec.line_length);
        meta["entropy_rate_bits"] = format_double(corpus::entropy_rate(src));
        meta["order1_rate_bits"] = format_double(std::log2(static_cast<double>(src.symbols)));
    } else if (spec.kind == "copy" || spec.kind == "tagging" || spec.kind == "noisy") {
        Rng rng(spec.seed);
        const std::size_t k = spec.symbols;
        if (k < 2) throw ConfigError("synth: need at least 2 symbols");
        double h_y_given_x = 0.0;
        double h_y = std::log2(static_cast<double>(k));
        if (spec.kind == "tagging") {
            if (spec.tags < 2 || spec.tags > k)
                throw ConfigError("synth: tags must be in [2, K]");
            // exact marginal over tags when K is not a multiple of the tag count
            num::Vec marg(spec.tags, 0.0);
            for (std::size_t i = 0; i < k; ++i) marg[i % spec.tags] += 1.0 / static_cast<double>(k);
            h_y = 0.0;
            for (double p : marg)
                if (p > 0.0) h_y -= p * std::log2(p);
        } else if (spec.kind == "noisy") {
            if (spec.flip <= 0.0 || spec.flip >= 1.0)
                throw ConfigError("synth: flip must be in (0,1)");
            const double keep = 1.0 - spec.flip;
            const double other = spec.flip / static_cast<double>(k - 1);
            h_y_given_x = -keep * std::log2(keep) -
                          spec.flip * std::log2(other);
        }
        for (std::size_t n = 0; n < spec.instances; ++n) {
            std::vector<std::size_t> x(spec.instance_length);
            for (auto& v : x) v = rng.below(k);
            std::ostringstream xs, ys;
            for (std::size_t t = 0; t < x.size(); ++t) {
                if (t) {
                    xs << ' ';
                    ys << ' ';
                }
                xs << 'w' << x[t];
                if (spec.kind == "copy") {
                    ys << 'w' << x[t];
                } else if (spec.kind == "tagging") {
                    ys << 't' << (x[t] % spec.tags);
                } else {
                    std::size_t y = x[t];
                    if (rng.uniform01() < spec.flip) {
                        std::size_t shift = 1 + rng.below(k - 1);
                        y = (x[t] + shift) % k;
                    }
                    ys << 'w' << y;
                }
            }
            tsv << xs.str() << '\t' << ys.str() << '\n';
        }
        meta["symbols"] = std::to_string(k);
        meta["instances"] = std::to_string(spec.instances);
        meta["instance_length"] = std::to_string(spec.instance_length);
        if (spec.kind == "tagging") meta["tags"] = std::to_string(spec.tags);
        if (spec.kind == "noisy") meta["flip"] = format_double(spec.flip);
        meta["h_y_bits"] = format_double(h_y);
        meta["h_y_given_x_bits"] = format_double(h_y_given_x);
    } else {
        throw ConfigError("synth: unknown kind '" + spec.kind +
                          "' (expected markov|markov2|copy|tagging|noisy)");
    }

    write_text_file(out_prefix + ".tsv", tsv.str());
    std::ostringstream ms;
    for (const auto& [key, value] : meta) ms << key << " = " << value << "\n";
    write_text_file(out_prefix + ".meta", ms.str());
    std::cout << "synth: wrote " << out_prefix << ".tsv (+ .meta)\n";
}

// ------------------------------------------------------------------- run-all

namespace {

struct RunTask {
    std::string name;
    std::string spec_text;
};

}  // namespace

void cmd_run_all(const std::string& out_dir, std::uint64_t seed) {
    const fs::path root(out_dir);
    fs::create_directories(root / "data");
    fs::create_directories(root / "vocab");
    fs::create_directories(root / "specs");
    fs::create_directories(root / "out");
    fs::create_directories(root / "reports");

    auto p = [&root](const std::string& rel) { return (root / rel).string(); };

    // ---- synthetic sources (train/heldout pairs with decorrelated seeds)
    {
        SynthSpec s;
        s.kind = "markov";
        s.length = 100000;
        s.line_length = 100;
        s.seed = seed * 10 + 1;
        cmd_synth(s, p("data/markov.train"));
        s.length = 20000;
        s.seed = seed * 10 + 2;
        cmd_synth(s, p("data/markov.heldout"));
    }
    {
        SynthSpec s;
        s.kind = "markov2";
        s.symbols = 4;
        s.length = 100000;
        s.line_length = 100;
        s.seed = seed * 10 + 3;
        cmd_synth(s, p("data/markov2.train"));
        s.length = 20000;
        s.seed = seed * 10 + 4;
        cmd_synth(s, p("data/markov2.heldout"));
    }
    for (const std::string kind : {"copy", "tagging", "noisy"}) {
        SynthSpec s;
        s.kind = kind;
        s.symbols = 8;
        s.tags = 4;
        s.flip = 0.2;
        s.instances = 5000;
        s.instance_length = 8;
        s.seed = seed * 10 + 5;
        cmd_synth(s, p("data/" + kind + ".train"));
        s.instances = 1000;
        s.seed = seed * 10 + 6;
        cmd_synth(s, p("data/" + kind + ".heldout"));
    }

    // ---- vocabularies
    cmd_vocab(p("data/markov.train.tsv"), "all", 100, p("vocab/markov.vocab"));
    cmd_vocab(p("data/copy.train.tsv"), "all", 100, p("vocab/copy.vocab"));
    cmd_vocab(p("data/noisy.train.tsv"), "all", 100, p("vocab/noisy.vocab"));
    cmd_vocab(p("data/tagging.train.tsv"), "input", 100, p("vocab/tagging.x.vocab"));
    cmd_vocab(p("data/tagging.train.tsv"), "output", 100, p("vocab/tagging.y.vocab"));

    // ---- experiment specs (relative paths keep hashes independent of out_dir)
    const std::string seed_line = "seed = " + std::to_string(seed) + "\n";
    std::vector<RunTask> tasks;
    tasks.push_back({"markov-predict",
                     "task = markov-predict\n"
                     "family = prediction\n"
                     "train = ../data/markov.train.tsv\n"
                     "heldout = ../data/markov.heldout.tsv\n"
                     "vocab = ../vocab/markov.vocab\n"
                     "dataset = markov\n"
                     "batch = 16\n"
                     "checkpoint = ../out/markov-predict.ckpt\n"
                     "trainlog = ../out/markov-predict.trainlog.csv\n" +
                         seed_line});
    tasks.push_back({"copy-seq",
                     "task = copy-seq\n"
                     "family = sequence_label\n"
                     "train = ../data/copy.train.tsv\n"
                     "heldout = ../data/copy.heldout.tsv\n"
                     "vocab = ../vocab/copy.vocab\n"
                     "dataset = copy\n"
                     "batch = 8\n"
                     "checkpoint = ../out/copy-seq.ckpt\n"
                     "trainlog = ../out/copy-seq.trainlog.csv\n" +
                         seed_line});
    tasks.push_back({"word-predict",
                     "task = word-predict\n"
                     "family = prediction\n"
                     "train = ../data/copy.train.tsv\n"
                     "heldout = ../data/copy.heldout.tsv\n"
                     "vocab = ../vocab/copy.vocab\n"
                     "field = output\n"
                     "dataset = copy\n"
                     "batch = 16\n"
                     "checkpoint = ../out/word-predict.ckpt\n"
                     "trainlog = ../out/word-predict.trainlog.csv\n" +
                         seed_line});
    tasks.push_back({"tag-aligned",
                     "task = tag-aligned\n"
                     "family = aligned\n"
                     "train = ../data/tagging.train.tsv\n"
                     "heldout = ../data/tagging.heldout.tsv\n"
                     "vocab_x = ../vocab/tagging.x.vocab\n"
                     "vocab_y = ../vocab/tagging.y.vocab\n"
                     "dataset = tagging\n"
                     "batch = 8\n"
                     "checkpoint = ../out/tag-aligned.ckpt\n"
                     "trainlog = ../out/tag-aligned.trainlog.csv\n" +
                         seed_line});
    tasks.push_back({"noisy-seq",
                     "task = noisy-seq\n"
                     "family = sequence_label\n"
                     "train = ../data/noisy.train.tsv\n"
                     "heldout = ../data/noisy.heldout.tsv\n"
                     "vocab = ../vocab/noisy.vocab\n"
                     "dataset = noisy\n"
                     "batch = 8\n"
                     "checkpoint = ../out/noisy-seq.ckpt\n"
                     "trainlog = ../out/noisy-seq.trainlog.csv\n" +
                         seed_line});

    std::vector<std::string> report_paths;
    for (const auto& task : tasks) {
        const std::string spec_path = p("specs/" + task.name + ".spec");
        write_text_file(spec_path, task.spec_text);
        cmd_train(spec_path, {});
        const ExperimentSpec spec = resolve_spec(spec_path, {});
        const std::string report = p("reports/" + task.name + ".csv");
        cmd_eval(spec.checkpoint_path, spec.heldout_path, spec_path, {}, report, false);
        report_paths.push_back(report);
    }

    // ---- n-gram baselines over the stream sources
    cmd_baseline(p("data/markov.train.tsv"), p("data/markov.heldout.tsv"), {1, 2, 3}, 1.0, seed,
                 p("reports/baseline-markov.csv"));
    cmd_baseline(p("data/markov2.train.tsv"), p("data/markov2.heldout.tsv"), {1, 2, 3}, 1.0, seed,
                 p("reports/baseline-markov2.csv"));

    cmd_compare(report_paths, p("reports/comparison.csv"));
    std::cout << "run-all: outputs under " << out_dir << "\n";
}

}  // namespace taskent::cli
