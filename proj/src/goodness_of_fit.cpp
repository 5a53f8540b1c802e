#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spusim/metrics.hpp"

namespace spusim {

LabelField reference_mode(std::span<const LabelField> runs) {
  if (runs.empty())
    throw std::invalid_argument("reference_mode needs at least one run");
  const LabelField &first = runs.front();
  int label_count = 1;
  for (const auto &r : runs) {
    if (r.width() != first.width() || r.height() != first.height())
      throw std::invalid_argument("runs have mismatched dimensions");
    for (Label l : r.labels())
      label_count = std::max(label_count, int(l) + 1);
  }

  LabelField out(first.width(), first.height(), 0);
  std::vector<std::size_t> counts(label_count);
  for (std::size_t v = 0; v < first.size(); ++v) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto &r : runs)
      ++counts[r[v]];
    out[v] = Label(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  return out;
}

double rmse(const LabelField &result, const LabelField &reference) {
  if (result.width() != reference.width() || result.height() != reference.height())
    throw std::invalid_argument("rmse: fields have mismatched dimensions");
  double sum = 0.0;
  for (std::size_t v = 0; v < result.size(); ++v) {
    const double d = double(result[v]) - double(reference[v]);
    sum += d * d;
  }
  return std::sqrt(sum / double(result.size()));
}

namespace {

void check_distribution(std::span<const double> p, const char *name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("jsd: ") + name + " has a negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument(std::string("jsd: ") + name + " does not sum to 1");
}

} // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("jsd: distributions differ in length");
  check_distribution(p, "P");
  check_distribution(q, "Q");

  // Summing per entry keeps jsd(p, q) == jsd(q, p) bit for bit.
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    double term = 0.0;
    if (p[i] > 0.0)
      term += p[i] * std::log(p[i] / m);
    if (q[i] > 0.0)
      term += q[i] * std::log(q[i] / m);
    total += term;
  }
  return std::clamp(0.5 * total, 0.0, std::log(2.0));
}

} // namespace spusim
