#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spusim/metrics.hpp"

namespace spusim {

using Json = nlohmann::ordered_json;

/// Box-plot statistics with the 1.5 x IQR outlier rule. Quartiles use linear
/// interpolation between order statistics.
struct BoxSummary {
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  std::size_t n_outliers = 0;
};

BoxSummary box_summary(std::span<const double> values);
double quantile(std::span<const double> sorted, double q);

/// Boxes overlap when their [q25, q75] ranges intersect.
bool boxes_overlap(const BoxSummary &a, const BoxSummary &b);

Json to_json(const BoxSummary &box);
Json to_json(const EssResult &ess);
Json to_json(const ConvergenceResult &conv);

/// Null for empty optionals.
Json optional_number(const std::optional<double> &v);

} // namespace spusim
