#include "spusim/reference_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spusim/rng.hpp"

namespace spusim {

Mode parse_mode(std::string_view name) {
  if (name == "sampling")
    return Mode::Sampling;
  if (name == "optimization")
    return Mode::Optimization;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  return mode == Mode::Sampling ? "sampling" : "optimization";
}

void validate(const RunConfig &config) {
  if (config.iterations < 1)
    throw std::invalid_argument("iterations must be positive");
  if (config.collect_last < 0 || config.collect_last > config.iterations)
    throw std::invalid_argument("collect_last must be in [0, iterations]");
  if (config.mode == Mode::Sampling) {
    if (!(config.temperature > 0.0) || !std::isfinite(config.temperature))
      throw std::invalid_argument("temperature must be positive");
  } else {
    if (!(config.t0 > 0.0) || !std::isfinite(config.t0))
      throw std::invalid_argument("initial temperature must be positive");
    if (config.decay != 0.0 && !(config.decay > 0.0 && config.decay < 1.0))
      throw std::invalid_argument("decay must be in (0, 1)");
  }
}

double effective_decay(const RunConfig &config) {
  if (config.decay != 0.0)
    return config.decay;
  return std::pow(0.1 / config.t0, 1.0 / config.iterations);
}

double temperature_at(const RunConfig &config, int k) {
  if (config.mode == Mode::Sampling)
    return config.temperature;
  return config.t0 * std::pow(effective_decay(config), k);
}

SampleTrace::SampleTrace(int width, int height, int label_count, std::size_t length)
    : width_(width), height_(height), label_count_(label_count), length_(length),
      data_(std::size_t(width) * height * length, 0) {}

SampleTrace::SampleTrace(int width, int height, int label_count, std::size_t length,
                         std::vector<Label> data)
    : width_(width), height_(height), label_count_(label_count), length_(length),
      data_(std::move(data)) {
  if (data_.size() != variables() * length_)
    throw std::invalid_argument("trace data size does not match dimensions");
  for (Label l : data_)
    if (l >= label_count_)
      throw std::invalid_argument("trace label out of range");
}

LabelField SampleTrace::last_sweep() const {
  if (length_ == 0)
    throw std::invalid_argument("empty trace has no last sweep");
  LabelField field(width_, height_, 0);
  for (std::size_t v = 0; v < variables(); ++v)
    field[v] = at(v, length_ - 1);
  return field;
}

void gibbs_probabilities_fp64(std::span<const double> energies, double temperature,
                              std::span<double> out) {
  const double emin = *std::min_element(energies.begin(), energies.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    out[i] = std::exp(-(energies[i] - emin) / temperature);
    sum += out[i];
  }
  for (std::size_t i = 0; i < energies.size(); ++i)
    out[i] /= sum;
}

std::vector<double> gibbs_probabilities_fp64(const GridModel &model, const LabelField &state,
                                             std::size_t var, double temperature,
                                             EnergyInput energy) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("temperature must be positive");
  std::vector<double> e(model.label_count());
  for (int l = 0; l < model.label_count(); ++l) {
    e[l] = model.total_energy(state, var, l);
    if (energy == EnergyInput::Quantized8)
      e[l] = quantize_energy(e[l]);
  }
  std::vector<double> p(e.size());
  gibbs_probabilities_fp64(e, temperature, p);
  return p;
}

int sample_inverse_cdf(std::span<const double> probabilities, double u) {
  double cdf = 0.0;
  int last_nonzero = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0)
      last_nonzero = int(i);
    cdf += probabilities[i];
    if (cdf > u)
      return int(i);
  }
  // Rounding left the total just below u.
  return last_nonzero;
}

RunResult run_reference(const GridModel &model, const RunConfig &config) {
  validate(config);
  const int L = model.label_count();
  UniformSource rng(config.seed);
  LabelField state = random_initial_state(model, rng);
  SampleTrace trace(model.width(), model.height(), L, std::size_t(config.collect_last));

  std::vector<double> energy(L);
  std::vector<std::uint8_t> energy8(L);
  std::vector<double> prob(L);
  const std::size_t first_kept = std::size_t(config.iterations - config.collect_last);

  for (int k = 0; k < config.iterations; ++k) {
    const double temperature = temperature_at(config, k);
    for (std::size_t v = 0; v < state.size(); ++v) {
      if (config.energy == EnergyInput::Quantized8) {
        model.energies_u8(state, v, energy8);
        for (int l = 0; l < L; ++l)
          energy[l] = energy8[l];
      } else {
        model.energies(state, v, energy);
      }
      gibbs_probabilities_fp64(energy, temperature, prob);
      state[v] = Label(sample_inverse_cdf(prob, rng.next()));
    }
    if (std::size_t(k) >= first_kept)
      for (std::size_t v = 0; v < state.size(); ++v)
        trace.set(v, k - first_kept, state[v]);
  }
  return RunResult{std::move(state), std::move(trace)};
}

LabelField mode_estimate(const SampleTrace &trace) {
  if (trace.length() == 0)
    throw std::invalid_argument("mode_estimate needs a nonempty trace");
  LabelField field(trace.width(), trace.height(), 0);
  std::vector<std::size_t> counts(trace.label_count());
  for (std::size_t v = 0; v < trace.variables(); ++v) {
    std::fill(counts.begin(), counts.end(), 0);
    for (Label l : trace.series(v))
      ++counts[l];
    field[v] = Label(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  return field;
}

} // namespace spusim
