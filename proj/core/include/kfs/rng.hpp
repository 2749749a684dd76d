#pragma once

#include <cstdint>
#include <random>

namespace kfs {

// Thin wrapper over std::mt19937_64 with platform-independent conversions
// (the standard distributions are implementation-defined, which would break
// byte-identical outputs across toolchains).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
    explicit Rng(std::seed_seq& seq) : eng_(seq) {}

    std::uint64_t next() { return eng_(); }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return p > 0.0 && uniform() < p; }
    // Uniform integer in [0, n).
    int below(int n);
    int sign() { return (eng_() >> 63) ? -1 : 1; }
    bool bit() { return (eng_() >> 63) != 0; }
    double normal();

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Independent stream for (seed, index, purpose). Seeding goes through
// std::seed_seq, whose mixing algorithm is fixed by the standard, so the
// stream for a given triple is the same on every platform and for any worker
// layout.
Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose = 0);

namespace stream_purpose {
inline constexpr std::uint64_t trajectory = 1;
inline constexpr std::uint64_t bootstrap = 2;
inline constexpr std::uint64_t optimizer = 3;
inline constexpr std::uint64_t test = 4;
}  // namespace stream_purpose

}  // namespace kfs
