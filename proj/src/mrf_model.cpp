#include "spusim/mrf_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spusim {

PairwiseTable::PairwiseTable(int label_count, std::vector<double> values)
    : label_count_(label_count), values_(std::move(values)) {
  if (label_count < 2)
    throw std::invalid_argument("pairwise table needs at least 2 labels");
  if (values_.size() != std::size_t(label_count) * label_count)
    throw std::invalid_argument("pairwise table must be L x L");
  for (int a = 0; a < label_count; ++a) {
    for (int b = 0; b < label_count; ++b) {
      const double v = (*this)(a, b);
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("pairwise energies must be finite and nonnegative");
      if (v != (*this)(b, a))
        throw std::invalid_argument("pairwise table must be symmetric");
    }
  }
}

PairwiseTable PairwiseTable::potts(int label_count) {
  std::vector<double> values(std::size_t(label_count) * label_count, 1.0);
  for (int l = 0; l < label_count; ++l)
    values[l * label_count + l] = 0.0;
  return PairwiseTable(label_count, std::move(values));
}

LabelField::LabelField(int width, int height, Label fill)
    : width_(width), height_(height), labels_(std::size_t(width) * height, fill) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("label field dimensions must be positive");
}

LabelField::LabelField(int width, int height, std::vector<Label> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("label field dimensions must be positive");
  if (labels_.size() != std::size_t(width) * height)
    throw std::invalid_argument("label count does not match field dimensions");
}

GridModel::GridModel(int width, int height, int label_count, double alpha, double beta,
                     std::vector<double> singleton, PairwiseTable pairwise)
    : width_(width), height_(height), label_count_(label_count), alpha_(alpha), beta_(beta),
      singleton_(std::move(singleton)), pairwise_(std::move(pairwise)) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("grid dimensions must be positive");
  if (label_count < 2 || label_count > kMaxLabels)
    throw std::invalid_argument("label_count must be in [2, 256]");
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("alpha and beta must be finite and nonnegative");
  if (singleton_.size() != variable_count() * label_count)
    throw std::invalid_argument("singleton table must hold width*height*L entries");
  for (double e : singleton_)
    if (!std::isfinite(e) || e < 0.0)
      throw std::invalid_argument("singleton energies must be finite and nonnegative");
  if (pairwise_.label_count() != label_count)
    throw std::invalid_argument("pairwise table label count mismatch");
}

int GridModel::neighbors(std::size_t var, std::size_t out[4]) const {
  const std::size_t x = var % width_;
  const std::size_t y = var / width_;
  int n = 0;
  if (y > 0)
    out[n++] = var - width_;
  if (x + 1 < std::size_t(width_))
    out[n++] = var + 1;
  if (y + 1 < std::size_t(height_))
    out[n++] = var + width_;
  if (x > 0)
    out[n++] = var - 1;
  return n;
}

double GridModel::total_energy(const LabelField &state, std::size_t var, int label) const {
  if (!matches(state))
    throw std::invalid_argument("state dimensions do not match model");
  if (var >= variable_count())
    throw std::out_of_range("variable index " + std::to_string(var) + " out of range");
  if (label < 0 || label >= label_count_)
    throw std::out_of_range("label " + std::to_string(label) + " out of range");

  std::size_t nbr[4];
  const int count = neighbors(var, nbr);
  double smooth = 0.0;
  for (int i = 0; i < count; ++i)
    smooth += pairwise_(label, state[nbr[i]]);
  return alpha_ * singleton(var, label) + beta_ * smooth;
}

void GridModel::energies(const LabelField &state, std::size_t var, std::span<double> out) const {
  std::size_t nbr[4];
  const int count = neighbors(var, nbr);
  const double *single = singleton_.data() + var * label_count_;
  for (int l = 0; l < label_count_; ++l) {
    double smooth = 0.0;
    for (int i = 0; i < count; ++i)
      smooth += pairwise_(l, state[nbr[i]]);
    out[l] = alpha_ * single[l] + beta_ * smooth;
  }
}

void GridModel::energies_u8(const LabelField &state, std::size_t var,
                            std::span<std::uint8_t> out) const {
  double buf[kMaxLabels];
  energies(state, var, std::span<double>(buf, label_count_));
  for (int l = 0; l < label_count_; ++l)
    out[l] = quantize_energy(buf[l]);
}

std::uint8_t quantize_energy(double energy) {
  const double r = std::nearbyint(energy);
  return std::uint8_t(std::clamp(r, 0.0, 255.0));
}

} // namespace spusim
