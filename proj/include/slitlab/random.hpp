#pragma once

#include <cstdint>
#include <limits>

namespace slitlab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Named sub-streams of one simulated measurement.
enum class Channel : std::uint64_t {
    herald = 1,
    pairs,
    signal,
    accidentals,
    gates,
    splitter,
    sampler,
};

/// Counter-based generator: the n-th output is a pure function of (key, n),
/// so any stream can be reproduced independently of how others were used.
/// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()()
    {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Independent stream for (seed, index, channel).
constexpr CounterRng make_stream(std::uint64_t seed, std::uint64_t index, Channel channel)
{
    std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    k = mix64(k ^ (index + 0x3c6ef372fe94f82bULL));
    k = mix64(k ^ (static_cast<std::uint64_t>(channel) * 0xa54ff53a5f1d36f1ULL));
    return CounterRng(k);
}

} // namespace slitlab
