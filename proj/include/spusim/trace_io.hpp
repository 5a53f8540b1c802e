#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spusim/reference_sampler.hpp"

namespace spusim {

/// Trace file layout, all integers little-endian:
///
///   bytes 0-3    magic "SPTR"
///   bytes 4-5    format version (1)
///   bytes 6-7    label count
///   bytes 8-11   width | (height << 16)   (each < 65536)
///   bytes 12-15  samples per variable
///   then width*height*length u16 labels, variable-major.
inline constexpr std::uint16_t kTraceVersion = 1;

std::vector<std::uint8_t> encode_trace(const SampleTrace &trace);
SampleTrace decode_trace(const std::vector<std::uint8_t> &bytes);

void save_trace(const std::filesystem::path &path, const SampleTrace &trace);
SampleTrace load_trace(const std::filesystem::path &path);

} // namespace spusim
