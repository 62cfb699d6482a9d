#pragma once

#include <cstdint>
#include <random>

namespace regimesplit {

/// One step of the splitmix64 mixer (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

/// Generator for substream `index` of `seed`. Streams for distinct indices are
/// independent in practice and do not depend on thread scheduling.
/// mt19937_64 output is fixed by the C++ standard, so streams match across platforms.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

}  // namespace regimesplit
