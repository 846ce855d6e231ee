#include "taskent/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "taskent/errors.hpp"

namespace taskent {

namespace {

constexpr char kMagic[4] = {'T', 'E', 'N', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("checkpoint: truncated file");
    return v;
}

void write_tensor(std::ostream& out, const std::vector<double>& t) {
    write_pod<std::uint64_t>(out, t.size());
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_tensor(std::istream& in, std::vector<double>& t, std::size_t expected) {
    auto n = read_pod<std::uint64_t>(in);
    if (n != expected)
        throw ConfigError("checkpoint: tensor has " + std::to_string(n) + " elements, expected " +
                          std::to_string(expected));
    t.resize(n);
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError("checkpoint: truncated tensor");
}

}  // namespace

void save_checkpoint(const Model& m, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write checkpoint: " + path);
        out.write(kMagic, 4);
        write_pod<std::uint32_t>(out, kVersion);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.params.hidden_dim()));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.params.embed_dim()));
        write_pod<std::uint64_t>(out, m.params.vocab_size());
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.family));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.head.scorer));
        write_pod<std::int64_t>(out, m.head.out_lo);
        write_pod<std::int64_t>(out, m.head.out_hi);
        write_pod<std::uint64_t>(out, m.head.w.rows);
        write_pod<std::uint64_t>(out, m.config_hash);
        write_pod<std::uint64_t>(out, m.seed);

        write_tensor(out, m.params.w_i.a);
        write_tensor(out, m.params.v_i.a);
        write_tensor(out, m.params.w_f.a);
        write_tensor(out, m.params.v_f.a);
        write_tensor(out, m.params.w_o.a);
        write_tensor(out, m.params.v_o.a);
        write_tensor(out, m.params.w_l.a);
        write_tensor(out, m.params.v_l.a);
        write_tensor(out, m.params.embedding.a);
        if (m.head.scorer != heads::Scorer::DotProduct) {
            write_tensor(out, m.head.w.a);
            write_tensor(out, m.head.u);
        }
        if (!out) throw IoError("checkpoint write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("checkpoint rename failed: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw ConfigError("checkpoint: bad magic in " + path);
    auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion)
        throw ConfigError("checkpoint: unsupported version " + std::to_string(version));

    const auto hidden = read_pod<std::uint32_t>(in);
    const auto embed = read_pod<std::uint32_t>(in);
    const auto vocab = read_pod<std::uint64_t>(in);

    Model m;
    m.family = static_cast<engine::TaskFamily>(read_pod<std::uint32_t>(in));
    m.head.scorer = static_cast<heads::Scorer>(read_pod<std::uint32_t>(in));
    m.head.out_lo = static_cast<int>(read_pod<std::int64_t>(in));
    m.head.out_hi = static_cast<int>(read_pod<std::int64_t>(in));
    const auto head_rows = read_pod<std::uint64_t>(in);
    m.config_hash = read_pod<std::uint64_t>(in);
    m.seed = read_pod<std::uint64_t>(in);

    m.params = lstm::LstmParameters::zeros(hidden, embed, vocab);
    read_tensor(in, m.params.w_i.a, hidden * embed);
    read_tensor(in, m.params.v_i.a, std::size_t{hidden} * hidden);
    read_tensor(in, m.params.w_f.a, hidden * embed);
    read_tensor(in, m.params.v_f.a, std::size_t{hidden} * hidden);
    read_tensor(in, m.params.w_o.a, hidden * embed);
    read_tensor(in, m.params.v_o.a, std::size_t{hidden} * hidden);
    read_tensor(in, m.params.w_l.a, hidden * embed);
    read_tensor(in, m.params.v_l.a, std::size_t{hidden} * hidden);
    read_tensor(in, m.params.embedding.a, vocab * embed);
    if (m.head.scorer != heads::Scorer::DotProduct) {
        m.head.w = num::Matrix(head_rows, 3 * embed);
        read_tensor(in, m.head.w.a, head_rows * 3 * embed);
        read_tensor(in, m.head.u, head_rows);
    }
    return m;
}

}  // namespace taskent
