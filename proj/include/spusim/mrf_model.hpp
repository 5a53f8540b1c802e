#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spusim {

using Label = std::uint16_t;

inline constexpr int kMaxLabels = 256;

/// Symmetric L x L table of neighborhood energies.
class PairwiseTable {
public:
  PairwiseTable() = default;
  PairwiseTable(int label_count, std::vector<double> values);

  /// 0 on the diagonal, 1 elsewhere.
  static PairwiseTable potts(int label_count);

  double operator()(int a, int b) const { return values_[a * label_count_ + b]; }
  int label_count() const { return label_count_; }

private:
  int label_count_ = 0;
  std::vector<double> values_;
};

/// One label per lattice site, row-major.
class LabelField {
public:
  LabelField() = default;
  LabelField(int width, int height, Label fill = 0);
  LabelField(int width, int height, std::vector<Label> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }

  Label operator[](std::size_t v) const { return labels_[v]; }
  Label &operator[](std::size_t v) { return labels_[v]; }

  std::span<const Label> labels() const { return labels_; }
  std::span<Label> labels() { return labels_; }

  bool operator==(const LabelField &) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Label> labels_;
};

/// First-order (4-connected) MRF over a width x height lattice.
///
/// E(v, l) = alpha * singleton(v, l) + beta * sum_{u in N(v)} pairwise(l, label(u))
///
/// Immutable once constructed; safe to share across sampler threads.
class GridModel {
public:
  GridModel(int width, int height, int label_count, double alpha, double beta,
            std::vector<double> singleton, PairwiseTable pairwise);

  int width() const { return width_; }
  int height() const { return height_; }
  int label_count() const { return label_count_; }
  std::size_t variable_count() const { return std::size_t(width_) * height_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const PairwiseTable &pairwise() const { return pairwise_; }

  double singleton(std::size_t var, int label) const {
    return singleton_[var * label_count_ + label];
  }
  std::span<const double> singleton_table() const { return singleton_; }

  /// Neighbors of `var` in N, E, S, W order; border sites return fewer.
  int neighbors(std::size_t var, std::size_t out[4]) const;

  /// Checked energy of assigning `label` to `var` given the rest of `state`.
  double total_energy(const LabelField &state, std::size_t var, int label) const;

  /// Unchecked fill of all L energies for `var`; `out` must hold L entries.
  void energies(const LabelField &state, std::size_t var, std::span<double> out) const;

  /// Energies rounded and clamped to the 8-bit range the accelerator consumes.
  void energies_u8(const LabelField &state, std::size_t var, std::span<std::uint8_t> out) const;

  bool matches(const LabelField &state) const {
    return state.width() == width_ && state.height() == height_;
  }

private:
  int width_;
  int height_;
  int label_count_;
  double alpha_;
  double beta_;
  std::vector<double> singleton_;
  PairwiseTable pairwise_;
};

/// Round to nearest and clamp to [0, 255].
std::uint8_t quantize_energy(double energy);

} // namespace spusim
