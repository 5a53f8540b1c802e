#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spusim/metrics.hpp"

namespace spusim {

RhatRecord gelman_rubin(std::span<const std::span<const double>> chains, double threshold) {
  const std::size_t m = chains.size();
  if (m < 2)
    throw std::invalid_argument("Gelman-Rubin needs at least 2 chains");
  const std::size_t n = chains.front().size();
  if (n < 2)
    throw std::invalid_argument("Gelman-Rubin needs at least 2 samples per chain");
  for (const auto &c : chains)
    if (c.size() != n)
      throw std::invalid_argument("Gelman-Rubin chains must have equal length");

  std::vector<double> means(m);
  double within = 0.0;
  double grand = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (double v : chains[j])
      sum += v;
    means[j] = sum / double(n);
    double ss = 0.0;
    for (double v : chains[j])
      ss += (v - means[j]) * (v - means[j]);
    within += ss / double(n - 1);
    grand += means[j];
  }
  within /= double(m);
  grand /= double(m);

  double spread = 0.0;
  for (double mj : means)
    spread += (mj - grand) * (mj - grand);
  const double between = double(n) / double(m - 1) * spread;

  RhatRecord rec;
  rec.within = within;
  rec.between = between;
  if (within == 0.0) {
    rec.branch = between == 0.0 ? RhatBranch::BothZero : RhatBranch::WithinZero;
    rec.converged = between == 0.0;
    return rec;
  }
  const double nd = double(n), md = double(m);
  const double pooled = (nd - 1.0) / nd * within + between / nd;
  const double rhat_sq = (md + 1.0) / md * (pooled / within) - (nd - 1.0) / (md * nd);
  rec.branch = RhatBranch::Regular;
  rec.rhat = std::sqrt(rhat_sq);
  rec.converged = *rec.rhat < threshold;
  return rec;
}

RhatRecord gelman_rubin(const std::vector<std::vector<double>> &chains, double threshold) {
  std::vector<std::span<const double>> views(chains.begin(), chains.end());
  return gelman_rubin(std::span<const std::span<const double>>(views), threshold);
}

double convergence_percentage(std::span<const RhatRecord> records) {
  if (records.empty())
    throw std::invalid_argument("convergence percentage needs at least one variable");
  std::size_t converged = 0;
  for (const auto &r : records)
    converged += r.converged ? 1 : 0;
  return 100.0 * double(converged) / double(records.size());
}

ConvergenceResult convergence(std::span<const SampleTrace> chains, std::size_t start,
                              double threshold) {
  if (chains.size() < 2)
    throw std::invalid_argument("convergence needs at least 2 chains");
  const SampleTrace &first = chains.front();
  for (const auto &c : chains)
    if (c.variables() != first.variables() || c.length() != first.length())
      throw std::invalid_argument("chains must share dimensions and length");
  if (start >= first.length())
    throw std::invalid_argument("burn-in leaves no samples");

  const std::size_t n = first.length() - start;
  std::vector<std::vector<double>> buf(chains.size(), std::vector<double>(n));
  std::vector<std::span<const double>> views(buf.begin(), buf.end());

  ConvergenceResult result;
  result.per_variable.reserve(first.variables());
  for (std::size_t v = 0; v < first.variables(); ++v) {
    for (std::size_t j = 0; j < chains.size(); ++j) {
      const auto series = chains[j].series(v).subspan(start);
      std::copy(series.begin(), series.end(), buf[j].begin());
    }
    result.per_variable.push_back(
        gelman_rubin(std::span<const std::span<const double>>(views), threshold));
  }
  result.convergence_percentage = convergence_percentage(result.per_variable);
  return result;
}

SampleTrace split_vector_labels(const SampleTrace &trace, int radix) {
  if (radix < 1)
    throw std::invalid_argument("radix must be positive");
  const int components = (trace.label_count() + radix - 1) / radix;
  const int label_count = std::max({radix, components, 2});
  const std::size_t n = trace.length();
  std::vector<Label> data(trace.variables() * 2 * n);
  for (std::size_t v = 0; v < trace.variables(); ++v) {
    for (std::size_t t = 0; t < n; ++t) {
      const Label l = trace.at(v, t);
      data[(2 * v) * n + t] = Label(l % radix);
      data[(2 * v + 1) * n + t] = Label(l / radix);
    }
  }
  return SampleTrace(trace.width() * 2, trace.height(), label_count, n, std::move(data));
}

} // namespace spusim
