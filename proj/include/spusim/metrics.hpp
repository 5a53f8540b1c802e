#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spusim/mrf_model.hpp"
#include "spusim/reference_sampler.hpp"

namespace spusim {

// ---------------------------------------------------------------------------
// Sampling quality: effective sample size
// ---------------------------------------------------------------------------

/// rho(k) = gamma(k) / gamma(0), gamma(k) = (1/n) sum_{t < n-k} (x_t - mean)(x_{t+k} - mean).
/// Direct O(n) evaluation. Throws std::domain_error on a zero-variance sequence.
double autocorr(std::span<const double> x, std::size_t k);

/// rho(0..max_lag) for a sequence with nonzero variance, via FFT.
std::vector<double> autocorr_all(std::span<const double> x, std::size_t max_lag);

struct VariableEss {
  bool active = false;
  double ess = 0.0;
  // Estimator exceeded the sample count; reported unclipped.
  bool over_unity = false;
};

/// n / (1 + 2 sum_{k=1}^{K} rho(k)), with K ending before the first lag pair
/// (k, k+1) = (1,2), (3,4), ... whose sum is negative. Zero variance -> inactive.
VariableEss ess(std::span<const double> x);
VariableEss ess(std::span<const Label> labels);

struct EssResult {
  std::vector<VariableEss> per_variable;
  std::size_t samples = 0;
  // Mean over active variables; empty when none are active.
  std::optional<double> mean_overall_ess;
  double inactive_percentage = 0.0;
};

/// ESS of every variable over the trailing `window` samples (0 = whole trace).
EssResult ess_all(const SampleTrace &trace, std::size_t window = 0);

struct ActiveEss {
  std::optional<double> sw_mean;
  std::optional<double> hw_mean;
  std::size_t joint_active = 0;
  std::string reason; // set when the joint-active set is empty
};

/// Means restricted to variables active in both results.
ActiveEss mean_active_ess(const EssResult &sw, const EssResult &hw);

// ---------------------------------------------------------------------------
// Convergence: Gelman-Rubin with the zero-variance decision process
// ---------------------------------------------------------------------------

enum class RhatBranch { BothZero, WithinZero, Regular };

struct RhatRecord {
  bool converged = false;
  RhatBranch branch = RhatBranch::Regular;
  double within = 0.0;  // W
  double between = 0.0; // B
  std::optional<double> rhat;
};

inline constexpr double kRhatThreshold = 1.1;

/// W = mean within-chain sample variance (n-1 denominator),
/// B = n/(m-1) sum_j (mean_j - mean)^2.
/// W = 0 and B = 0 -> converged; W = 0 and B > 0 -> not converged;
/// otherwise R-hat from the pooled variance estimate, converged iff R-hat < threshold.
RhatRecord gelman_rubin(std::span<const std::span<const double>> chains,
                        double threshold = kRhatThreshold);
RhatRecord gelman_rubin(const std::vector<std::vector<double>> &chains,
                        double threshold = kRhatThreshold);

struct ConvergenceResult {
  std::vector<RhatRecord> per_variable;
  double convergence_percentage = 0.0;
};

/// Per-variable R-hat across chains using samples [start, length) of each trace.
ConvergenceResult convergence(std::span<const SampleTrace> chains, std::size_t start = 0,
                              double threshold = kRhatThreshold);

/// Percentage of converged records.
double convergence_percentage(std::span<const RhatRecord> records);

/// Splits labels l = y * radix + x into two scalar variables (x, y), so a
/// 2D label such as a motion vector counts as two random variables.
SampleTrace split_vector_labels(const SampleTrace &trace, int radix);

// ---------------------------------------------------------------------------
// Goodness of fit
// ---------------------------------------------------------------------------

/// Per-variable modal label across runs; ties go to the smallest label.
LabelField reference_mode(std::span<const LabelField> runs);

double rmse(const LabelField &result, const LabelField &reference);

/// Jensen-Shannon divergence (natural log, bounded by ln 2). Inputs must be
/// nonnegative and sum to 1 within 1e-9.
double jsd(std::span<const double> p, std::span<const double> q);

} // namespace spusim
