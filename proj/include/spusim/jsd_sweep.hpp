#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "spusim/spu_pipeline.hpp"

namespace spusim {

/// JSD of a pipeline's binary sampling distribution against another pipeline
/// (or the FP64 softmax) for every energy pair (E(0), E(1)) in [0, 255]^2.
struct JsdGrid {
  double temperature = 0.0;
  std::vector<double> values = std::vector<double>(256 * 256, 0.0); // index e0 * 256 + e1

  double at(int e0, int e1) const { return values[std::size_t(e0) * 256 + e1]; }
  double max() const;
  double mean() const;
  std::size_t count_above(double threshold) const;
};

/// Distribution the pipeline samples from for two raw energies at temperature T.
/// Weights are normalized by their sum; an all-zero weight vector is a point
/// mass on the lower-energy label (label 0 on ties).
std::array<double, 2> pipeline_binary_distribution(const SpuConfig &config, const ProbLut &lut,
                                                   int e0, int e1, double temperature);

/// FP64 softmax over two energies.
std::array<double, 2> fp64_binary_distribution(int e0, int e1, double temperature);

/// `reference` empty -> compare against the FP64 softmax.
JsdGrid jsd_sweep(const SpuConfig &config, const std::optional<SpuConfig> &reference,
                  double temperature);

/// Header "e0,e1,jsd", 65536 rows, e0-major.
void write_jsd_csv(const std::filesystem::path &path, const JsdGrid &grid);

} // namespace spusim
