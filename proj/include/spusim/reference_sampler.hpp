#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "spusim/mrf_model.hpp"

namespace spusim {

enum class Mode { Sampling, Optimization };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

enum class EnergyInput {
  // Energies rounded/clamped to 8 bits, identical to what the accelerator front-end produces.
  Quantized8,
  Exact,
};

struct RunConfig {
  Mode mode = Mode::Sampling;
  int iterations = 1000;
  // Sampling mode.
  double temperature = 1.0;
  // Optimization mode: T_k = t0 * decay^k. decay == 0 picks the rate that reaches 0.1 at k = n.
  double t0 = 10.0;
  double decay = 0.0;
  std::uint64_t seed = 1;
  // Trailing sweeps kept in the trace.
  int collect_last = 0;
  EnergyInput energy = EnergyInput::Quantized8;
};

/// Throws std::invalid_argument when the config is out of contract.
void validate(const RunConfig &config);

/// Temperature used for outer iteration k (0-based).
double temperature_at(const RunConfig &config, int k);
double effective_decay(const RunConfig &config);

/// Per-variable label sequences, variable-major: the samples of variable v are contiguous.
class SampleTrace {
public:
  SampleTrace() = default;
  SampleTrace(int width, int height, int label_count, std::size_t length);
  SampleTrace(int width, int height, int label_count, std::size_t length, std::vector<Label> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int label_count() const { return label_count_; }
  std::size_t variables() const { return std::size_t(width_) * height_; }
  std::size_t length() const { return length_; }

  std::span<const Label> series(std::size_t var) const {
    return {data_.data() + var * length_, length_};
  }
  Label at(std::size_t var, std::size_t t) const { return data_[var * length_ + t]; }
  void set(std::size_t var, std::size_t t, Label l) { data_[var * length_ + t] = l; }

  std::span<const Label> data() const { return data_; }

  /// The final retained sweep as a field.
  LabelField last_sweep() const;

  bool operator==(const SampleTrace &) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  int label_count_ = 0;
  std::size_t length_ = 0;
  std::vector<Label> data_;
};

struct RunResult {
  LabelField end_state;
  SampleTrace trace;
};

/// Softmax of -E/T with the minimum energy subtracted first.
void gibbs_probabilities_fp64(std::span<const double> energies, double temperature,
                              std::span<double> out);
std::vector<double> gibbs_probabilities_fp64(const GridModel &model, const LabelField &state,
                                             std::size_t var, double temperature,
                                             EnergyInput energy = EnergyInput::Exact);

/// First index whose cumulative probability (label order 0..L-1) exceeds u.
int sample_inverse_cdf(std::span<const double> probabilities, double u);

/// Uniform-random initial labels; consumes one draw per variable in raster order.
template <class Source>
LabelField random_initial_state(const GridModel &model, Source &rng) {
  LabelField state(model.width(), model.height(), 0);
  for (std::size_t v = 0; v < state.size(); ++v)
    state[v] = Label(rng.below(model.label_count()));
  return state;
}

/// FP64 Gibbs sampler with raster-order sweeps and a MT19937-64 uniform source.
RunResult run_reference(const GridModel &model, const RunConfig &config);

/// Per-variable most frequent label; ties go to the smallest label.
LabelField mode_estimate(const SampleTrace &trace);

} // namespace spusim
