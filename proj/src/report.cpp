#include "spusim/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spusim {

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty())
    throw std::invalid_argument("quantile of an empty set");
  const double pos = q * double(sorted.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxSummary box_summary(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("box summary of an empty set");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxSummary b;
  b.min = s.front();
  b.max = s.back();
  b.q25 = quantile(s, 0.25);
  b.median = quantile(s, 0.5);
  b.q75 = quantile(s, 0.75);
  const double iqr = b.q75 - b.q25;
  const double lo = b.q25 - 1.5 * iqr;
  const double hi = b.q75 + 1.5 * iqr;
  b.n_outliers = std::size_t(std::count_if(s.begin(), s.end(), [&](double v) { return v < lo || v > hi; }));
  return b;
}

bool boxes_overlap(const BoxSummary &a, const BoxSummary &b) {
  return a.q25 <= b.q75 && b.q25 <= a.q75;
}

Json optional_number(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

Json to_json(const BoxSummary &box) {
  return Json{{"min", box.min},       {"q25", box.q25}, {"median", box.median},
              {"q75", box.q75},       {"max", box.max}, {"n_outliers", box.n_outliers}};
}

Json to_json(const EssResult &ess) {
  Json per = Json::array();
  std::size_t over = 0;
  for (const auto &v : ess.per_variable) {
    per.push_back(v.active ? Json(v.ess) : Json(nullptr));
    over += v.over_unity ? 1 : 0;
  }
  return Json{{"samples", ess.samples},
              {"mean_overall_ess", optional_number(ess.mean_overall_ess)},
              {"inactive_percentage", ess.inactive_percentage},
              {"over_unity_count", over},
              {"per_variable", std::move(per)}};
}

namespace {

const char *branch_name(RhatBranch b) {
  switch (b) {
  case RhatBranch::BothZero:
    return "w0_b0";
  case RhatBranch::WithinZero:
    return "w0_bpos";
  case RhatBranch::Regular:
    break;
  }
  return "rhat";
}

} // namespace

Json to_json(const ConvergenceResult &conv) {
  Json converged = Json::array(), branch = Json::array(), w = Json::array(), b = Json::array(),
       rhat = Json::array();
  for (const auto &r : conv.per_variable) {
    converged.push_back(r.converged);
    branch.push_back(branch_name(r.branch));
    w.push_back(r.within);
    b.push_back(r.between);
    rhat.push_back(optional_number(r.rhat));
  }
  return Json{{"convergence_percentage", conv.convergence_percentage},
              {"converged", std::move(converged)},
              {"branch", std::move(branch)},
              {"W", std::move(w)},
              {"B", std::move(b)},
              {"rhat", std::move(rhat)}};
}

} // namespace spusim
