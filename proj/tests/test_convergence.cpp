#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spusim/metrics.hpp"

using namespace spusim;

namespace {

std::vector<std::vector<double>> iid_chains(int m, int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(3.0, 2.0);
  std::vector<std::vector<double>> c(m, std::vector<double>(n));
  for (auto &chain : c)
    for (auto &v : chain)
      v = d(gen);
  return c;
}

// Textbook R-hat, written out independently of the library.
double rhat_oracle(const std::vector<std::vector<double>> &c) {
  const double m = double(c.size()), n = double(c[0].size());
  std::vector<double> means;
  double grand = 0;
  for (const auto &ch : c) {
    double s = 0;
    for (double v : ch)
      s += v;
    means.push_back(s / n);
    grand += s / n;
  }
  grand /= m;
  double B = 0, W = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    B += (means[j] - grand) * (means[j] - grand);
    double s2 = 0;
    for (double v : c[j])
      s2 += (v - means[j]) * (v - means[j]);
    W += s2 / (n - 1);
  }
  B *= n / (m - 1);
  W /= m;
  const double var = (n - 1) / n * W + B / n;
  return std::sqrt((m + 1) / m * var / W - (n - 1) / (m * n));
}

} // namespace

TEST_CASE("R-hat decision branches") {
  SUBCASE("equal constants converge") {
    const auto r = gelman_rubin(std::vector<std::vector<double>>(3, std::vector<double>(10, 2.0)));
    CHECK(r.converged);
    CHECK(r.branch == RhatBranch::BothZero);
    CHECK_FALSE(r.rhat);
  }
  SUBCASE("different constants do not") {
    const auto r = gelman_rubin({std::vector<double>(10, 0.0), std::vector<double>(10, 1.0)});
    CHECK_FALSE(r.converged);
    CHECK(r.branch == RhatBranch::WithinZero);
    CHECK(r.between > 0.0);
  }
  SUBCASE("well-mixed chains converge") {
    const auto c = iid_chains(4, 1000, 1);
    const auto r = gelman_rubin(c);
    CHECK(r.converged);
    REQUIRE(r.rhat);
    CHECK(*r.rhat < 1.1);
    CHECK(*r.rhat == doctest::Approx(rhat_oracle(c)).epsilon(1e-12));
  }
  SUBCASE("disjoint chains do not") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
    std::vector<std::vector<double>> c(2, std::vector<double>(100));
    for (int j = 0; j < 2; ++j)
      for (auto &v : c[j])
        v = 100.0 * j + noise(gen);
    const auto r = gelman_rubin(c);
    CHECK_FALSE(r.converged);
    REQUIRE(r.rhat);
    CHECK(*r.rhat > 100.0);
  }
  SUBCASE("needs two chains of two samples") {
    CHECK_THROWS_AS(gelman_rubin({std::vector<double>(10, 1.0)}), std::invalid_argument);
    CHECK_THROWS_AS(gelman_rubin({std::vector<double>{1.0}, std::vector<double>{2.0}}),
                    std::invalid_argument);
  }
}

TEST_CASE("R-hat is affine invariant") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = iid_chains(3, 50, seed);
    c[0][0] += 5.0; // make the chains differ a little
    const double base = *gelman_rubin(c).rhat;
    for (auto [a, b] : {std::pair{2.0, 7.0}, std::pair{-0.5, 1e3}, std::pair{1e3, -4.0}}) {
      auto t = c;
      for (auto &ch : t)
        for (auto &v : ch)
          v = a * v + b;
      CHECK(std::abs(*gelman_rubin(t).rhat - base) < 1e-9);
    }
  }
}

TEST_CASE("convergence percentage over traces") {
  std::vector<SampleTrace> chains;
  for (int j = 0; j < 3; ++j) {
    SampleTrace t(2, 1, 3, 20);
    for (std::size_t k = 0; k < 20; ++k) {
      t.set(0, k, 1);       // same constant everywhere
      t.set(1, k, Label(j)); // a different constant per chain
    }
    chains.push_back(t);
  }
  const auto half = convergence(chains);
  CHECK(half.convergence_percentage == 50.0);
  CHECK(half.per_variable[0].converged);
  CHECK_FALSE(half.per_variable[1].converged);

  for (auto &t : chains)
    for (std::size_t k = 0; k < 20; ++k)
      t.set(1, k, 2);
  CHECK(convergence(chains).convergence_percentage == 100.0);
  CHECK_THROWS(convergence_percentage({}));
}

TEST_CASE("convergence percentage stays in range and is monotone") {
  std::mt19937 gen(6);
  std::vector<RhatRecord> recs(40);
  for (auto &r : recs)
    r.converged = gen() % 2;
  double last = convergence_percentage(recs);
  CHECK(last >= 0.0);
  CHECK(last <= 100.0);
  for (auto &r : recs) {
    if (r.converged)
      continue;
    r.converged = true;
    const double now = convergence_percentage(recs);
    CHECK(now >= last);
    CHECK(now <= 100.0);
    last = now;
  }
  CHECK(last == 100.0);
}

TEST_CASE("vector labels split into two scalar variables") {
  SampleTrace t(2, 1, 9, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    t.set(0, k, Label(1 * 3 + 2)); // (x=2, y=1)
    t.set(1, k, Label(k));
  }
  const SampleTrace s = split_vector_labels(t, 3);
  CHECK(s.variables() == 4);
  CHECK(s.length() == 4);
  CHECK(s.at(0, 0) == 2);
  CHECK(s.at(1, 0) == 1);
  CHECK(s.at(2, 3) == 0); // 3 = (0, 1)
  CHECK(s.at(3, 3) == 1);
}
