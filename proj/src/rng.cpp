#include "bohm/rng.hpp"

#include <cmath>
#include <numbers>

namespace bohm
{
namespace
{
constexpr std::uint32_t philox_m0 = 0xD2511F53;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57;
constexpr std::uint32_t philox_w0 = 0x9E3779B9;
constexpr std::uint32_t philox_w1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    std::uint64_t const product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}
}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(philox_m0, ctr[0], hi0, lo0);
        mulhilo(philox_m1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += philox_w0;
        key[1] += philox_w1;
    }
    return ctr;
}

double to_open_unit(std::uint64_t bits)
{
    // (k + 0.5) / 2^52 is exact and never hits 0 or 1.
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

NormalPair normal_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t stream)
{
    Philox4x32::Counter const counter{static_cast<std::uint32_t>(index),
                                      static_cast<std::uint32_t>(index >> 32),
                                      stream,
                                      0};
    Philox4x32::Key const key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    auto const out = Philox4x32::generate(counter, key);
    std::uint64_t const a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    std::uint64_t const b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];

    double const u1 = to_open_unit(a);
    double const u2 = to_open_unit(b);
    double const radius = std::sqrt(-2 * std::log(u1));
    double const angle = 2 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace bohm
