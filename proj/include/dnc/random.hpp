#pragma once

#include <cstdint>
#include <random>

namespace dnc {

/// splitmix64 finaliser; used to derive independent per-layer seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// mt19937_64 with a fixed mapping to doubles, so values do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) from the top 53 bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on [-1, 1).
    double symmetric() { return 2.0 * unit() - 1.0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace dnc
