#include "spusim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "spusim/rng.hpp"

namespace spusim {

GridModel build_stereo_model(const GrayImage &left, const GrayImage &right, int label_count,
                             double alpha, double beta) {
  if (left.width != right.width || left.height != right.height)
    throw std::invalid_argument("stereo images must have identical dimensions");
  if (left.width < 1 || left.height < 1)
    throw std::invalid_argument("stereo images must be nonempty");
  if (label_count < 2 || label_count > left.width)
    throw std::invalid_argument("label count must be in [2, width]");

  const int w = left.width;
  const int h = left.height;
  std::vector<double> singleton(std::size_t(w) * h * label_count);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t v = std::size_t(y) * w + x;
      for (int d = 0; d < label_count; ++d) {
        const int xr = std::max(x - d, 0);
        const int diff = std::abs(int(left.at(x, y)) - int(right.at(xr, y)));
        singleton[v * label_count + d] = double(std::min(diff, 255));
      }
    }
  }
  return GridModel(w, h, label_count, alpha, beta, std::move(singleton),
                   PairwiseTable::potts(label_count));
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "two-label-denoise")
    return SyntheticKind::TwoLabelDenoise;
  if (name == "shifted-stereo")
    return SyntheticKind::ShiftedStereo;
  throw std::invalid_argument("unknown synthetic kind '" + std::string(name) + "'");
}

std::string_view to_string(SyntheticKind kind) {
  return kind == SyntheticKind::TwoLabelDenoise ? "two-label-denoise" : "shifted-stereo";
}

namespace {

LabelField denoise_truth(int size, UniformSource &rng) {
  LabelField truth(size, size, 0);
  const int shapes = 3;
  for (int s = 0; s < shapes; ++s) {
    const double cx = rng.next() * size;
    const double cy = rng.next() * size;
    const double r = size * (0.12 + 0.18 * rng.next());
    const bool disc = (s % 2) == 0;
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        const bool inside = disc ? (dx * dx + dy * dy <= r * r)
                                 : (std::abs(dx) <= r && std::abs(dy) <= 0.6 * r);
        if (inside)
          truth[std::size_t(y) * size + x] = 1;
      }
    }
  }
  return truth;
}

SyntheticInstance make_denoise(const SyntheticSpec &spec) {
  UniformSource rng(spec.seed);
  const int n = spec.size;
  LabelField truth = denoise_truth(n, rng);

  GrayImage obs{n, n, std::vector<std::uint8_t>(std::size_t(n) * n)};
  std::vector<double> singleton(std::size_t(n) * n * 2);
  for (std::size_t v = 0; v < truth.size(); ++v) {
    Label observed = truth[v];
    if (rng.next() < spec.noise)
      observed = Label(1 - observed);
    obs.pixels[v] = observed ? 255 : 0;
    singleton[v * 2 + 0] = observed == 0 ? 0.0 : 1.0;
    singleton[v * 2 + 1] = observed == 1 ? 0.0 : 1.0;
  }
  GridModel model(n, n, 2, spec.alpha, spec.beta, std::move(singleton),
                  PairwiseTable::potts(2));
  return SyntheticInstance{std::move(model), std::move(truth), std::move(obs), GrayImage{}};
}

SyntheticInstance make_stereo(const SyntheticSpec &spec) {
  if (spec.labels < 2 || spec.labels > spec.size)
    throw std::invalid_argument("stereo label count must be in [2, size]");
  if (spec.shift < 0 || spec.shift >= spec.labels)
    throw std::invalid_argument("stereo shift must be in [0, labels)");

  UniformSource rng(spec.seed);
  const int n = spec.size;
  GrayImage right{n, n, std::vector<std::uint8_t>(std::size_t(n) * n)};
  for (auto &p : right.pixels)
    p = std::uint8_t(rng.below(256));

  GrayImage left{n, n, std::vector<std::uint8_t>(std::size_t(n) * n)};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      left.pixels[std::size_t(y) * n + x] = right.at(std::max(x - spec.shift, 0), y);
  for (auto &p : left.pixels)
    if (rng.next() < spec.noise)
      p = std::uint8_t(rng.below(256));

  GridModel model = build_stereo_model(left, right, spec.labels, spec.alpha, spec.beta);
  LabelField truth(n, n, Label(spec.shift));
  return SyntheticInstance{std::move(model), std::move(truth), std::move(left), std::move(right)};
}

} // namespace

SyntheticInstance build_synthetic_model(const SyntheticSpec &spec) {
  if (spec.size < 8)
    throw std::invalid_argument("synthetic size must be at least 8");
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0))
    throw std::invalid_argument("noise must be in [0, 1]");
  return spec.kind == SyntheticKind::TwoLabelDenoise ? make_denoise(spec) : make_stereo(spec);
}

GrayImage label_map_image(const LabelField &field, int label_count) {
  GrayImage img{field.width(), field.height(), std::vector<std::uint8_t>(field.size())};
  const int denom = std::max(label_count - 1, 1);
  for (std::size_t v = 0; v < field.size(); ++v)
    img.pixels[v] = std::uint8_t(std::min(255, int(field[v]) * 255 / denom));
  return img;
}

} // namespace spusim
