#pragma once

#include <array>
#include <cstdint>

namespace bohm
{

/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * Output is a pure function of (key, counter), so sample i of an ensemble can
 * be drawn without touching any other sample's stream.
 */
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
};

struct NormalPair
{
    double first = 0;
    double second = 0;
};

//! Two independent standard normals for (seed, index, stream), via Box-Muller.
NormalPair normal_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t stream = 0);

//! Uniform double in (0, 1) from the 52 high bits of a 64-bit word.
double to_open_unit(std::uint64_t bits);

}  // namespace bohm
