#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "spusim/metrics.hpp"

using namespace spusim;

namespace {

std::vector<double> iid_labels(std::size_t n, int L, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> x(n);
  for (auto &v : x)
    v = double(gen() % L);
  return x;
}

std::vector<double> sticky_chain(std::size_t n, double stay, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution keep(stay);
  std::vector<double> x(n);
  double s = double(gen() % 2);
  for (auto &v : x) {
    if (!keep(gen))
      s = 1.0 - s;
    v = s;
  }
  return x;
}

} // namespace

TEST_CASE("autocorrelation") {
  std::vector<double> alt(1000);
  for (std::size_t i = 0; i < alt.size(); ++i)
    alt[i] = i % 2 ? -1.0 : 1.0;
  CHECK(autocorr(alt, 0) == doctest::Approx(1.0));
  CHECK(std::abs(autocorr(alt, 1) + 1.0) < 0.01);

  const auto x = iid_labels(10000, 4, 1);
  CHECK(autocorr(x, 0) == doctest::Approx(1.0));
  CHECK(std::abs(autocorr(x, 1)) < 0.05);

  CHECK_THROWS_AS(autocorr(std::vector<double>(10, 3.0), 1), std::domain_error);
}

TEST_CASE("FFT autocorrelation agrees with the direct sum") {
  for (std::size_t n : {5u, 64u, 333u, 1000u}) {
    auto x = sticky_chain(n, 0.7, n);
    x[0] = 2.0;
    const auto all = autocorr_all(x, n - 1);
    for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 50))
      CHECK(all[k] == doctest::Approx(autocorr(x, k)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("ESS") {
  SUBCASE("constant trace is inactive") {
    const auto r = ess(std::vector<double>(500, 2.0));
    CHECK_FALSE(r.active);
  }
  SUBCASE("iid labels are worth about n samples") {
    const std::size_t n = 10000;
    const auto r = ess(iid_labels(n, 2, 3));
    CHECK(r.active);
    CHECK(r.ess >= 0.9 * n);
    CHECK(r.ess <= 1.1 * n);
  }
  SUBCASE("sticky two-state chain") {
    // rho(k) = 0.8^k gives ESS/n = (1 - 0.8) / (1 + 0.8).
    const std::size_t n = 20000;
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      total += ess(sticky_chain(n, 0.9, seed)).ess / double(n);
    CHECK(std::abs(total / 5 - 1.0 / 9.0) < 0.25 / 9.0);
  }
  SUBCASE("anti-correlated chain stops at the first pair and reports n") {
    // Every summed pair is nonnegative, so the estimate is bounded by n.
    const auto r = ess(sticky_chain(4000, 0.2, 9));
    CHECK(r.active);
    CHECK(r.ess == 4000.0);
    CHECK_FALSE(r.over_unity);
  }
  SUBCASE("shuffling a correlated trace raises the estimate") {
    int raised = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto x = sticky_chain(3000, 0.95, seed);
      const double before = ess(x).ess;
      std::mt19937_64 gen(seed + 100);
      std::shuffle(x.begin(), x.end(), gen);
      raised += ess(x).ess > before ? 1 : 0;
    }
    CHECK(raised == 10);
  }
  SUBCASE("too short") { CHECK_THROWS(ess(std::vector<double>{0, 1, 0})); }
}

TEST_CASE("per-trace ESS uses the trailing window") {
  SampleTrace t(2, 1, 2, 100);
  for (std::size_t k = 0; k < 100; ++k) {
    t.set(0, k, Label(k % 2));
    t.set(1, k, Label(k < 50 ? k % 2 : 1));
  }
  const auto all = ess_all(t);
  CHECK(all.samples == 100);
  CHECK(all.inactive_percentage == 0.0);
  const auto tail = ess_all(t, 40);
  CHECK(tail.samples == 40);
  CHECK(tail.per_variable[0].active);
  CHECK_FALSE(tail.per_variable[1].active);
  CHECK(tail.inactive_percentage == 50.0);
  REQUIRE(tail.mean_overall_ess);
  CHECK(*tail.mean_overall_ess == doctest::Approx(tail.per_variable[0].ess));
}

TEST_CASE("mean ESS over jointly active variables") {
  auto make = [](std::vector<std::optional<double>> values) {
    EssResult r;
    for (auto v : values)
      r.per_variable.push_back(VariableEss{v.has_value(), v.value_or(0.0), false});
    return r;
  };
  SUBCASE("mask intersection") {
    const auto out = mean_active_ess(make({100.0, 50.0, std::nullopt}),
                                     make({80.0, std::nullopt, 10.0}));
    CHECK(out.joint_active == 1);
    CHECK(*out.sw_mean == 100.0);
    CHECK(*out.hw_mean == 80.0);
  }
  SUBCASE("no active hardware variables") {
    const auto out = mean_active_ess(make({1.0, 2.0}), make({std::nullopt, std::nullopt}));
    CHECK_FALSE(out.sw_mean);
    CHECK_FALSE(out.hw_mean);
    CHECK_FALSE(out.reason.empty());
  }
  SUBCASE("identical inputs") {
    const auto r = make({4.0, std::nullopt, 8.0});
    const auto out = mean_active_ess(r, r);
    CHECK(*out.sw_mean == 6.0);
    CHECK(*out.hw_mean == 6.0);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(mean_active_ess(make({1.0}), make({1.0, 2.0})), std::invalid_argument);
  }
}
