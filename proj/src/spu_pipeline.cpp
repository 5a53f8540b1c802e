#include "spusim/spu_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spusim/rng.hpp"

namespace spusim {

std::string_view to_string(RngKind kind) {
  return kind == RngKind::Lfsr19 ? "lfsr19" : "fp64_uniform";
}

std::string_view to_string(Backend backend) {
  return backend == Backend::Quantized ? "quantized" : "fp64";
}

void validate(const SpuConfig &config, int label_count) {
  try {
    validate(config.run);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (config.backend == Backend::Fp64)
    return;
  if (config.p_bits != 4 && config.p_bits != 6 && config.p_bits != 8)
    throw ConfigError("p_bits must be 4, 6 or 8 (got " + std::to_string(config.p_bits) + ")");
  const long max_total = long(label_count) * ((1L << config.p_bits) - 1);
  if (max_total > long(kSamplerRange))
    throw ConfigError("L * (2^p_bits - 1) = " + std::to_string(max_total) +
                      " exceeds the 12-bit sampler range");
}

void dynamic_scale(std::span<const int> energies, std::span<std::uint8_t> out) {
  const int emin = *std::min_element(energies.begin(), energies.end());
  for (std::size_t i = 0; i < energies.size(); ++i)
    out[i] = std::uint8_t(std::min(energies[i] - emin, 255));
}

std::uint16_t truncated_probability(int scaled_energy, double temperature, int p_bits,
                                    bool pow2_approx) {
  const double scaled = double((1 << p_bits) - 1) * std::exp(-scaled_energy / temperature);
  if (scaled < 1.0)
    return 0;
  if (pow2_approx)
    return std::uint16_t(1u << std::ilogb(scaled));
  return std::uint16_t(std::floor(scaled));
}

ProbLut build_lut(double temperature, int p_bits, bool pow2_approx) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("temperature must be positive");
  ProbLut lut;
  lut.temperature = temperature;
  lut.p_bits = p_bits;
  lut.pow2_approx = pow2_approx;
  for (int e = 0; e < 256; ++e)
    lut.entries[e] = truncated_probability(e, temperature, p_bits, pow2_approx);
  return lut;
}

namespace {

int argmin_energy(std::span<const std::uint8_t> scaled_energies) {
  return int(std::min_element(scaled_energies.begin(), scaled_energies.end()) -
             scaled_energies.begin());
}

int first_above(std::span<const std::uint16_t> weights, std::uint32_t threshold) {
  std::uint32_t cumulative = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (cumulative > threshold)
      return int(i);
  }
  return int(weights.size()) - 1; // unreachable for threshold < W
}

std::uint32_t weight_sum(std::span<const std::uint16_t> weights) {
  std::uint32_t total = 0;
  for (auto w : weights)
    total += w;
  return total;
}

} // namespace

int sample_discrete(std::span<const std::uint16_t> weights, std::uint32_t u12,
                    std::span<const std::uint8_t> scaled_energies) {
  const std::uint32_t total = weight_sum(weights);
  if (total == 0)
    return argmin_energy(scaled_energies);
  return first_above(weights, (u12 & (kSamplerRange - 1)) % total);
}

int sample_discrete(std::span<const std::uint16_t> weights, double u,
                    std::span<const std::uint8_t> scaled_energies) {
  const std::uint32_t total = weight_sum(weights);
  if (total == 0)
    return argmin_energy(scaled_energies);
  const auto threshold = std::min(std::uint32_t(u * total), total - 1);
  return first_above(weights, threshold);
}

RunResult spu_run(const GridModel &model, const SpuConfig &config) {
  const int L = model.label_count();
  validate(config, L);
  const RunConfig &run = config.run;

  UniformSource uniform(run.seed);
  LabelField state = random_initial_state(model, uniform);
  Lfsr19 lfsr = Lfsr19::from_seed(run.seed);
  SampleTrace trace(model.width(), model.height(), L, std::size_t(run.collect_last));
  const std::size_t first_kept = std::size_t(run.iterations - run.collect_last);

  std::vector<std::uint8_t> raw(L), scaled(L);
  std::vector<int> widened(L);
  std::vector<std::uint16_t> weights(L);
  std::vector<double> scaled_fp(L), prob(L);
  ProbLut lut;

  for (int k = 0; k < run.iterations; ++k) {
    const double temperature = temperature_at(run, k);
    if (config.backend == Backend::Quantized && lut.temperature != temperature)
      lut = build_lut(temperature, config.p_bits, config.pow2_approx);

    for (std::size_t v = 0; v < state.size(); ++v) {
      model.energies_u8(state, v, raw);
      if (config.dynamic_scaling) {
        std::copy(raw.begin(), raw.end(), widened.begin());
        dynamic_scale(widened, scaled);
      } else {
        scaled = raw;
      }

      int label;
      if (config.backend == Backend::Quantized) {
        for (int l = 0; l < L; ++l)
          weights[l] = lut[scaled[l]];
        label = config.rng == RngKind::Lfsr19 ? sample_discrete(weights, lfsr.next(), scaled)
                                              : sample_discrete(weights, uniform.next(), scaled);
      } else {
        for (int l = 0; l < L; ++l)
          scaled_fp[l] = scaled[l];
        gibbs_probabilities_fp64(scaled_fp, temperature, prob);
        const double u = config.rng == RngKind::Lfsr19 ? lfsr.next() / double(kSamplerRange)
                                                       : uniform.next();
        label = sample_inverse_cdf(prob, u);
      }
      state[v] = Label(label);
    }
    if (std::size_t(k) >= first_kept)
      for (std::size_t v = 0; v < state.size(); ++v)
        trace.set(v, k - first_kept, state[v]);
  }
  return RunResult{std::move(state), std::move(trace)};
}

} // namespace spusim
