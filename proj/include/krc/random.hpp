#ifndef KRC_RANDOM_HPP
#define KRC_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace krc {

/**
 * Seeded pseudo-random source used by every generator and by k-means++.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The standard distributions are implementation-defined, so the
 * bounded-integer and unit-interval draws are implemented here; together this
 * makes every seeded experiment byte-reproducible across compilers.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection on the largest multiple of bound.
        const std::uint64_t limit = -bound % bound; // == 2^64 mod bound
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= limit) return x % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace krc

#endif
