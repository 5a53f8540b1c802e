#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

#include "spusim/mrf_model.hpp"
#include "spusim/reference_sampler.hpp"

namespace spusim {

enum class RngKind { Lfsr19, Fp64Uniform };
enum class Backend { Quantized, Fp64 };

std::string_view to_string(RngKind kind);
std::string_view to_string(Backend backend);

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// One accelerator design point plus the run it drives.
///
/// Energies are always 8-bit. With backend == Fp64 the probability width and
/// 2^n flag are ignored: the scaled energies go through an FP64 softmax and an
/// FP64 inverse transform instead of the LUT and integer sampler.
struct SpuConfig {
  int p_bits = 4;
  bool pow2_approx = true;
  RngKind rng = RngKind::Lfsr19;
  Backend backend = Backend::Quantized;
  // Off models the earlier design that feeds raw energies to the LUT.
  bool dynamic_scaling = true;
  RunConfig run;
};

/// Throws ConfigError for p_bits outside {4, 6, 8} or L * (2^p_bits - 1) > 4096.
void validate(const SpuConfig &config, int label_count);

inline constexpr int kSamplerBits = 12;
inline constexpr std::uint32_t kSamplerRange = 1u << kSamplerBits;

/// E_s(i) = E(i) - min_j E(j), saturated to 255.
void dynamic_scale(std::span<const int> energies, std::span<std::uint8_t> out);

/// Energy-to-probability table for one temperature.
struct ProbLut {
  std::array<std::uint16_t, 256> entries{};
  double temperature = 0.0;
  int p_bits = 0;
  bool pow2_approx = false;

  std::uint16_t operator[](std::uint8_t scaled_energy) const { return entries[scaled_energy]; }
};

/// Scalar form of one table entry: p_s = (2^p_bits - 1) * exp(-E_s / T), then
/// floor(p_s), or the largest power of two <= p_s with pow2_approx; 0 whenever p_s < 1.
std::uint16_t truncated_probability(int scaled_energy, double temperature, int p_bits,
                                    bool pow2_approx);

ProbLut build_lut(double temperature, int p_bits, bool pow2_approx);

/// Inverse transform over integer weights with a 12-bit draw: u' = u mod W,
/// first i with prefix sum > u'. An all-zero vector picks the lowest
/// scaled energy (smallest index on ties).
int sample_discrete(std::span<const std::uint16_t> weights, std::uint32_t u12,
                    std::span<const std::uint8_t> scaled_energies);

/// Same with a uniform real u in [0, 1): threshold floor(u * W).
int sample_discrete(std::span<const std::uint16_t> weights, double u,
                    std::span<const std::uint8_t> scaled_energies);

/// Full pipeline run: 8-bit energies, dynamic scaling, LUT (rebuilt whenever T
/// changes), integer inverse transform fed by the configured RNG.
RunResult spu_run(const GridModel &model, const SpuConfig &config);

} // namespace spusim
