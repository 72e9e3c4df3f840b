#pragma once

#include <filesystem>
#include <string_view>

#include "shiftlab/blocks.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab::cli {

// Weight grammar:
//   constant:<c>
//   periodic:<v1,v2,...>[@<anchor>]
//   split:neg=<spec>;pos=<spec>;cut=<n>      nested specs may be wrapped in (...)
//   explicit:<file.csv>;negfill=<c>;posfill=<c>   CSV rows "index,value", optional header
//   fhc:blocks=<rule>[;horizon=<n>]
// Throws ParseError (with a character offset) on malformed text and
// PreconditionError on well-formed but invalid values.
WeightModel parse_weights(std::string_view text, const std::filesystem::path& base_dir = {});

// geometric:<b> | list:<n0,n1,...>
BlockRule parse_blocks(std::string_view text);

inline constexpr std::int64_t kDefaultFhcHorizon = 100000;

}  // namespace shiftlab::cli
