#include "spusim/trace_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "spusim/pgm.hpp"

namespace spusim {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'T', 'R'};
constexpr std::size_t kHeaderSize = 16;

void put_u16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(std::uint8_t(v & 0xFF));
  out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint16_t get_u16(const std::vector<std::uint8_t> &in, std::size_t at) {
  return std::uint16_t(in[at] | (in[at + 1] << 8));
}

std::uint32_t get_u32(const std::vector<std::uint8_t> &in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= std::uint32_t(in[at + i]) << (8 * i);
  return v;
}

} // namespace

std::vector<std::uint8_t> encode_trace(const SampleTrace &trace) {
  if (trace.width() >= 65536 || trace.height() >= 65536)
    throw std::invalid_argument("trace dimensions exceed the file format");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + trace.data().size() * 2);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u16(out, kTraceVersion);
  put_u16(out, std::uint16_t(trace.label_count()));
  put_u32(out, std::uint32_t(trace.width()) | (std::uint32_t(trace.height()) << 16));
  put_u32(out, std::uint32_t(trace.length()));
  for (Label l : trace.data())
    put_u16(out, l);
  return out;
}

SampleTrace decode_trace(const std::vector<std::uint8_t> &bytes) {
  if (bytes.size() < kHeaderSize)
    throw FormatError("trace: truncated header", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("trace: bad magic", 0);
  if (get_u16(bytes, 4) != kTraceVersion)
    throw FormatError("trace: unsupported version " + std::to_string(get_u16(bytes, 4)), 4);
  const int label_count = get_u16(bytes, 6);
  const std::uint32_t dims = get_u32(bytes, 8);
  const int width = int(dims & 0xFFFF);
  const int height = int(dims >> 16);
  const std::size_t length = get_u32(bytes, 12);
  if (width < 1 || height < 1)
    throw FormatError("trace: zero dimension", 8);
  const std::size_t count = std::size_t(width) * height * length;
  if (bytes.size() != kHeaderSize + 2 * count)
    throw FormatError("trace: payload size mismatch", bytes.size());

  std::vector<Label> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = get_u16(bytes, kHeaderSize + 2 * i);
    if (data[i] >= label_count)
      throw FormatError("trace: label out of range", kHeaderSize + 2 * i);
  }
  return SampleTrace(width, height, label_count, length, std::move(data));
}

void save_trace(const std::filesystem::path &path, const SampleTrace &trace) {
  const auto bytes = encode_trace(trace);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()), std::streamsize(bytes.size()));
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

SampleTrace load_trace(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

} // namespace spusim
