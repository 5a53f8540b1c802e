#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "spusim/mrf_model.hpp"
#include "spusim/pgm.hpp"

namespace spusim {

/// Stereo matching model: singleton(x, y, d) = |left(x, y) - right(max(x - d, 0), y)|,
/// Potts smoothness.
GridModel build_stereo_model(const GrayImage &left, const GrayImage &right, int label_count,
                             double alpha, double beta);

enum class SyntheticKind { TwoLabelDenoise, ShiftedStereo };

SyntheticKind parse_synthetic_kind(std::string_view name);
std::string_view to_string(SyntheticKind kind);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::TwoLabelDenoise;
  int size = 32;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double beta = 1.0;
  // Denoise: per-pixel flip probability. Stereo: fraction of left pixels re-drawn at random.
  double noise = 0.1;
  // Stereo only.
  int labels = 4;
  int shift = 2;
};

struct SyntheticInstance {
  GridModel model;
  LabelField truth;
  // Denoise: the noisy binary observation (0/255). Stereo: the left image.
  GrayImage observation;
  // Stereo only; empty for denoise.
  GrayImage right;
};

/// Deterministic for a fixed spec.
///
/// Two-label denoise: the truth is a union of seeded discs and rectangles, the
/// observation flips each truth pixel with probability `noise`, and
/// singleton(v, l) = 1 if l differs from the observed label, else 0.
SyntheticInstance build_synthetic_model(const SyntheticSpec &spec);

/// Labels scaled to the full 8-bit range for visual inspection.
GrayImage label_map_image(const LabelField &field, int label_count);

} // namespace spusim
