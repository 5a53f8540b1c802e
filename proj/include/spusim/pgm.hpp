#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace spusim {

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  bool operator==(const GrayImage &) const = default;
};

class FormatError : public std::runtime_error {
public:
  FormatError(const std::string &what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Binary PGM (P5), maxval <= 255. Throws FormatError with the failing byte offset.
GrayImage decode_pgm(const std::vector<std::uint8_t> &bytes);
GrayImage load_pgm(const std::filesystem::path &path);

std::vector<std::uint8_t> encode_pgm(const GrayImage &image);
void save_pgm(const std::filesystem::path &path, const GrayImage &image);

} // namespace spusim
