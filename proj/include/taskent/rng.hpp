#ifndef TASKENT_RNG_HPP
#define TASKENT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace taskent {

// mt19937_64 is fully specified by the standard; the double construction and
// the shuffle below avoid std::uniform_real_distribution / std::shuffle,
// whose outputs are implementation-defined.  Fixed seed => identical streams
// on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1), 53 random bits
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace taskent

#endif
