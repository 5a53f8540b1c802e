#include "spusim/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

namespace spusim {

namespace {

class HeaderReader {
public:
  HeaderReader(const std::vector<std::uint8_t> &bytes, std::size_t start)
      : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
          ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  unsigned long number(const char *what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000UL)
        throw FormatError(std::string("PGM ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start)
      throw FormatError(std::string("PGM header: expected ") + what, start);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw FormatError("PGM header: expected whitespace before raster", pos_);
    ++pos_;
  }

private:
  const std::vector<std::uint8_t> &bytes_;
  std::size_t pos_;
};

} // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t> &bytes) {
  if (bytes.size() < 2)
    throw FormatError("PGM: truncated magic", bytes.size());
  if (bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("PGM: unsupported magic (need binary P5)", 0);

  HeaderReader hdr(bytes, 2);
  const unsigned long width = hdr.number("width");
  const unsigned long height = hdr.number("height");
  const unsigned long maxval = hdr.number("maxval");
  const std::size_t maxval_end = hdr.pos();
  hdr.single_space();
  if (width == 0 || height == 0)
    throw FormatError("PGM: zero image dimension", 2);
  if (maxval == 0 || maxval > 255)
    throw FormatError("PGM: maxval must be in [1, 255]", maxval_end);

  const std::size_t raster = hdr.pos();
  const std::size_t count = std::size_t(width) * height;
  if (bytes.size() - raster < count)
    throw FormatError("PGM: truncated raster, expected " + std::to_string(count) + " bytes",
                      bytes.size());

  GrayImage img;
  img.width = int(width);
  img.height = int(height);
  img.pixels.assign(bytes.begin() + raster, bytes.begin() + raster + count);
  for (std::size_t i = 0; i < count; ++i)
    if (img.pixels[i] > maxval)
      throw FormatError("PGM: pixel exceeds maxval", raster + i);
  return img;
}

GrayImage load_pgm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage &image) {
  if (image.width < 1 || image.height < 1 ||
      image.pixels.size() != std::size_t(image.width) * image.height)
    throw std::invalid_argument("encode_pgm: pixel buffer does not match dimensions");
  const std::string header =
      "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

void save_pgm(const std::filesystem::path &path, const GrayImage &image) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()), std::streamsize(bytes.size()));
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

} // namespace spusim
