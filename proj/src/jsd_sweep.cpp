#include "spusim/jsd_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "spusim/metrics.hpp"

namespace spusim {

double JsdGrid::max() const { return *std::max_element(values.begin(), values.end()); }

double JsdGrid::mean() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

std::size_t JsdGrid::count_above(double threshold) const {
  return std::size_t(
      std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
}

std::array<double, 2> fp64_binary_distribution(int e0, int e1, double temperature) {
  const double energies[2] = {double(e0), double(e1)};
  std::array<double, 2> p{};
  gibbs_probabilities_fp64(energies, temperature, p);
  return p;
}

std::array<double, 2> pipeline_binary_distribution(const SpuConfig &config, const ProbLut &lut,
                                                   int e0, int e1, double temperature) {
  std::array<std::uint8_t, 2> scaled{};
  if (config.dynamic_scaling) {
    const int raw[2] = {e0, e1};
    dynamic_scale(raw, scaled);
  } else {
    scaled = {std::uint8_t(e0), std::uint8_t(e1)};
  }
  if (config.backend == Backend::Fp64)
    return fp64_binary_distribution(scaled[0], scaled[1], temperature);

  const double w0 = lut[scaled[0]];
  const double w1 = lut[scaled[1]];
  if (w0 + w1 == 0.0)
    return scaled[1] < scaled[0] ? std::array<double, 2>{0.0, 1.0}
                                 : std::array<double, 2>{1.0, 0.0};
  return {w0 / (w0 + w1), w1 / (w0 + w1)};
}

JsdGrid jsd_sweep(const SpuConfig &config, const std::optional<SpuConfig> &reference,
                  double temperature) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("temperature must be positive");
  validate(config, 2);
  if (reference)
    validate(*reference, 2);

  const ProbLut lut = config.backend == Backend::Quantized
                          ? build_lut(temperature, config.p_bits, config.pow2_approx)
                          : ProbLut{};
  ProbLut ref_lut;
  if (reference && reference->backend == Backend::Quantized)
    ref_lut = build_lut(temperature, reference->p_bits, reference->pow2_approx);

  JsdGrid grid;
  grid.temperature = temperature;
  for (int e0 = 0; e0 < 256; ++e0) {
    for (int e1 = 0; e1 < 256; ++e1) {
      const auto hw = pipeline_binary_distribution(config, lut, e0, e1, temperature);
      const auto sw = reference ? pipeline_binary_distribution(*reference, ref_lut, e0, e1, temperature)
                                : fp64_binary_distribution(e0, e1, temperature);
      grid.values[std::size_t(e0) * 256 + e1] = jsd(sw, hw);
    }
  }
  return grid;
}

void write_jsd_csv(const std::filesystem::path &path, const JsdGrid &grid) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << "e0,e1,jsd\n";
  char buf[64];
  for (int e0 = 0; e0 < 256; ++e0) {
    for (int e1 = 0; e1 < 256; ++e1) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", e0, e1, grid.at(e0, e1));
      out << buf;
    }
  }
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

} // namespace spusim
