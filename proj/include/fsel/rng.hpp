#pragma once
#include <cstdint>
#include <random>
#include <string_view>

namespace fsel {

// Deterministic generator for the sub-stream `name` of a top-level seed.
// Distinct names give independent streams, so adding a stream never shifts another.
std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name);

}  // namespace fsel
