#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>

#include "spusim/metrics.hpp"

namespace spusim {

namespace {

double mean_of(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x)
    sum += v;
  return sum / double(x.size());
}

bool has_variance(std::span<const double> x) {
  return std::any_of(x.begin(), x.end(), [&](double v) { return v != x.front(); });
}

// Real-to-complex and back plans for one padded length. Planning is not
// thread-safe in FFTW; execution with new-array calls is.
struct FftPlans {
  fftw_plan forward;
  fftw_plan backward;
};

class PlanCache {
public:
  ~PlanCache() {
    for (auto &[n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  FftPlans get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end())
      return it->second;
    double *in = fftw_alloc_real(n);
    fftw_complex *out = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    FftPlans p{fftw_plan_dft_r2c_1d(n, in, out, flags), fftw_plan_dft_c2r_1d(n, out, in, flags)};
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

private:
  std::mutex mutex_;
  std::map<int, FftPlans> plans_;
};

PlanCache &plan_cache() {
  static PlanCache cache;
  return cache;
}

} // namespace

double autocorr(std::span<const double> x, std::size_t k) {
  const std::size_t n = x.size();
  if (n < 2)
    throw std::invalid_argument("autocorr needs at least 2 samples");
  if (k >= n)
    throw std::invalid_argument("lag must be smaller than the sequence length");
  if (!has_variance(x))
    throw std::domain_error("autocorrelation undefined for a zero-variance sequence");

  const double m = mean_of(x);
  double g0 = 0.0, gk = 0.0;
  for (std::size_t t = 0; t < n; ++t)
    g0 += (x[t] - m) * (x[t] - m);
  for (std::size_t t = 0; t + k < n; ++t)
    gk += (x[t] - m) * (x[t + k] - m);
  return gk / g0;
}

std::vector<double> autocorr_all(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n < 2)
    throw std::invalid_argument("autocorr needs at least 2 samples");
  if (!has_variance(x))
    throw std::domain_error("autocorrelation undefined for a zero-variance sequence");
  max_lag = std::min(max_lag, n - 1);

  int padded = 1;
  while (std::size_t(padded) < 2 * n)
    padded <<= 1;
  const FftPlans plans = plan_cache().get(padded);

  std::vector<double> buf(padded, 0.0);
  std::vector<std::complex<double>> spec(padded / 2 + 1);
  const double m = mean_of(x);
  for (std::size_t t = 0; t < n; ++t)
    buf[t] = x[t] - m;

  auto *cspec = reinterpret_cast<fftw_complex *>(spec.data());
  fftw_execute_dft_r2c(plans.forward, buf.data(), cspec);
  for (auto &c : spec)
    c = std::norm(c);
  fftw_execute_dft_c2r(plans.backward, cspec, buf.data());

  std::vector<double> rho(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k)
    rho[k] = buf[k] / buf[0];
  return rho;
}

VariableEss ess(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4)
    throw std::invalid_argument("ESS needs at least 4 samples");
  if (!has_variance(x))
    return VariableEss{};

  const std::vector<double> rho = autocorr_all(x, n - 1);
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < n; k += 2) {
    const double pair = rho[k] + rho[k + 1];
    if (pair < 0.0)
      break;
    sum += pair;
  }
  const double value = double(n) / (1.0 + 2.0 * sum);
  return VariableEss{true, value, value > double(n)};
}

VariableEss ess(std::span<const Label> labels) {
  std::vector<double> x(labels.begin(), labels.end());
  return ess(x);
}

EssResult ess_all(const SampleTrace &trace, std::size_t window) {
  const std::size_t n = trace.length();
  if (window == 0 || window > n)
    window = n;
  EssResult result;
  result.samples = window;
  result.per_variable.reserve(trace.variables());

  std::vector<double> x(window);
  double sum = 0.0;
  std::size_t active = 0;
  for (std::size_t v = 0; v < trace.variables(); ++v) {
    const auto series = trace.series(v).subspan(n - window);
    std::copy(series.begin(), series.end(), x.begin());
    const VariableEss e = ess(x);
    if (e.active) {
      sum += e.ess;
      ++active;
    }
    result.per_variable.push_back(e);
  }
  if (active > 0)
    result.mean_overall_ess = sum / double(active);
  const std::size_t vars = trace.variables();
  result.inactive_percentage = vars ? 100.0 * double(vars - active) / double(vars) : 0.0;
  return result;
}

ActiveEss mean_active_ess(const EssResult &sw, const EssResult &hw) {
  if (sw.per_variable.size() != hw.per_variable.size())
    throw std::invalid_argument("ESS results cover different variable counts");
  ActiveEss out;
  double sw_sum = 0.0, hw_sum = 0.0;
  for (std::size_t v = 0; v < sw.per_variable.size(); ++v) {
    if (sw.per_variable[v].active && hw.per_variable[v].active) {
      sw_sum += sw.per_variable[v].ess;
      hw_sum += hw.per_variable[v].ess;
      ++out.joint_active;
    }
  }
  if (out.joint_active == 0) {
    out.reason = "no variable is active in both results";
    return out;
  }
  out.sw_mean = sw_sum / double(out.joint_active);
  out.hw_mean = hw_sum / double(out.joint_active);
  return out;
}

} // namespace spusim
