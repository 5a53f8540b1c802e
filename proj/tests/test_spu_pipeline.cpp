#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <set>

#include "spusim/jsd_sweep.hpp"
#include "spusim/metrics.hpp"
#include "spusim/rng.hpp"
#include "spusim/spu_pipeline.hpp"

using namespace spusim;

namespace {

GridModel random_model(int w, int h, int L, double alpha, double beta, unsigned seed) {
  std::mt19937 gen(seed);
  std::vector<double> s(std::size_t(w) * h * L);
  for (auto &v : s)
    v = double(gen() % 6);
  return GridModel(w, h, L, alpha, beta, std::move(s), PairwiseTable::potts(L));
}

SpuConfig pd_config(const RunConfig &run) {
  SpuConfig c;
  c.backend = Backend::Fp64;
  c.rng = RngKind::Fp64Uniform;
  c.run = run;
  return c;
}

} // namespace

TEST_CASE("dynamic scaling") {
  std::vector<std::uint8_t> out(3);
  std::vector<int> a{5, 5, 5};
  dynamic_scale(a, out);
  CHECK(out == std::vector<std::uint8_t>{0, 0, 0});
  std::vector<int> b{10, 30, 255};
  dynamic_scale(b, out);
  CHECK(out == std::vector<std::uint8_t>{0, 20, 245});
  std::vector<int> c{0, 400};
  std::vector<std::uint8_t> two(2);
  dynamic_scale(c, two);
  CHECK(two == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("LUT entries") {
  CHECK(truncated_probability(0, 1.0, 4, true) == 8);
  CHECK(truncated_probability(0, 1.0, 4, false) == 15);
  CHECK(truncated_probability(3, 1.0, 4, true) == 0);
  CHECK(truncated_probability(3, 1.0, 4, false) == 0);
  CHECK(truncated_probability(2, 1.0, 4, false) == 2);
  for (double T : {0.5, 1.0, 37.0}) {
    CHECK(truncated_probability(0, T, 8, false) == 255);
    CHECK(truncated_probability(0, T, 8, true) == 128);
  }
  const ProbLut lut = build_lut(1.0, 6, true);
  for (int e = 0; e < 256; ++e)
    CHECK(lut[std::uint8_t(e)] == truncated_probability(e, 1.0, 6, true));
}

TEST_CASE("LUT properties") {
  for (int bits : {4, 6, 8})
    for (double T : {0.3, 1.0, 10.0}) {
      const ProbLut plain = build_lut(T, bits, false);
      const ProbLut pow2 = build_lut(T, bits, true);
      for (int e = 0; e < 256; ++e) {
        const auto p = plain.entries[e], q = pow2.entries[e];
        CHECK(p <= (1u << bits) - 1);
        CHECK(q <= p);
        CHECK((q & (q - 1)) == 0); // power of two or zero
        if (e > 0) {
          CHECK(p <= plain.entries[e - 1]);
          CHECK(q <= pow2.entries[e - 1]);
        }
      }
    }
}

TEST_CASE("LFSR") {
  SUBCASE("zero state is rejected") { CHECK_THROWS_AS(Lfsr19(0), std::invalid_argument); }
  SUBCASE("full period and balanced output") {
    Lfsr19 r(1);
    std::vector<int> hist(4096, 0);
    std::uint32_t steps = 0;
    do {
      hist[r.next()]++;
      ++steps;
    } while (r.state() != 1 && steps <= Lfsr19::kPeriod);
    CHECK(steps == Lfsr19::kPeriod);
    for (int c : hist)
      CHECK((c == 127 || c == 128));
  }
  SUBCASE("same seed, same stream") {
    Lfsr19 a = Lfsr19::from_seed(42), b = Lfsr19::from_seed(42);
    for (int i = 0; i < 1000; ++i)
      CHECK(a.next() == b.next());
    CHECK(Lfsr19::from_seed(0).state() != 0);
  }
}

TEST_CASE("integer inverse transform") {
  std::vector<std::uint8_t> es{0, 0, 0};
  std::vector<std::uint16_t> single{8, 0, 0};
  for (std::uint32_t u = 0; u < 4096; u += 97)
    CHECK(sample_discrete(single, u, es) == 0);
  std::vector<std::uint16_t> pair{1, 1};
  std::vector<std::uint8_t> es2{0, 0};
  for (std::uint32_t u = 0; u < 64; ++u)
    CHECK(sample_discrete(pair, u, es2) == int(u % 2));
  std::vector<std::uint16_t> zeros{0, 0, 0};
  std::vector<std::uint8_t> energies{7, 3, 9};
  CHECK(sample_discrete(zeros, 1234u, energies) == 1);
  CHECK(sample_discrete(zeros, 0.7, energies) == 1);
  std::vector<std::uint8_t> tied{4, 2, 2};
  CHECK(sample_discrete(zeros, 0u, tied) == 1);
}

TEST_CASE("integer inverse transform with a real uniform matches the weights") {
  std::vector<std::uint16_t> w{8, 4, 2, 1};
  std::vector<std::uint8_t> es{0, 1, 2, 3};
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i)
    counts[sample_discrete(w, u(gen), es)]++;
  for (int i = 0; i < 4; ++i) {
    const double p = w[i] / 15.0;
    const double sigma = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(counts[i] - n * p) < 3 * sigma);
  }
}

TEST_CASE("FP64 back-end reproduces the reference sampler") {
  GridModel m = random_model(8, 6, 3, 1.0, 1.0, 21);
  for (Mode mode : {Mode::Sampling, Mode::Optimization}) {
    RunConfig run;
    run.mode = mode;
    run.iterations = 60;
    run.collect_last = 30;
    run.seed = 5;
    run.energy = EnergyInput::Quantized8;
    const auto ref = run_reference(m, run);
    const auto pd = spu_run(m, pd_config(run));
    CHECK(ref.trace == pd.trace);
    CHECK(ref.end_state == pd.end_state);
  }
}

TEST_CASE("4-bit pipeline freezes a variable whose competitors are 3 or more above") {
  // Independent variables with a singleton gap of 3 at T = 1.
  const int w = 6, h = 6;
  std::vector<double> s;
  for (int v = 0; v < w * h; ++v) {
    s.push_back(v % 2 == 0 ? 0.0 : 3.0);
    s.push_back(v % 2 == 0 ? 3.0 : 0.0);
  }
  GridModel m(w, h, 2, 1.0, 0.0, s, PairwiseTable::potts(2));
  for (bool pow2 : {true, false}) {
    SpuConfig c;
    c.p_bits = 4;
    c.pow2_approx = pow2;
    c.run.iterations = 20;
    c.run.collect_last = 19;
    const auto r = spu_run(m, c);
    for (std::size_t v = 0; v < m.variable_count(); ++v)
      for (Label l : r.trace.series(v))
        CHECK(l == (v % 2 == 0 ? 0 : 1));
  }
}

TEST_CASE("pipeline determinism and config validation") {
  GridModel m = random_model(5, 5, 4, 1.0, 1.0, 3);
  SpuConfig c;
  c.run.iterations = 30;
  c.run.collect_last = 10;
  c.run.seed = 77;
  CHECK(spu_run(m, c).end_state == spu_run(m, c).end_state);
  c.rng = RngKind::Fp64Uniform;
  CHECK(spu_run(m, c).trace == spu_run(m, c).trace);

  SpuConfig bad;
  bad.p_bits = 5;
  CHECK_THROWS_AS(validate(bad, 2), ConfigError);
  SpuConfig wide;
  wide.p_bits = 8;
  CHECK_NOTHROW(validate(wide, 16));
  CHECK_THROWS_AS(validate(wide, 17), ConfigError);
}

TEST_CASE("binary JSD sweep") {
  SpuConfig spu;
  SUBCASE("equal energies give zero") {
    const JsdGrid g = jsd_sweep(spu, std::nullopt, 1.0);
    for (int e = 0; e < 256; ++e)
      CHECK(g.at(e, e) == 0.0);
  }
  SUBCASE("4-bit truncation at a gap of 3") {
    spu.pow2_approx = false;
    const ProbLut lut = build_lut(1.0, 4, false);
    const auto hw = pipeline_binary_distribution(spu, lut, 0, 3, 1.0);
    const auto sw = fp64_binary_distribution(0, 3, 1.0);
    CHECK(hw[0] == 1.0);
    CHECK(hw[1] == 0.0);
    CHECK(sw[0] == doctest::Approx(0.9526).epsilon(1e-4));
    const JsdGrid g = jsd_sweep(spu, std::nullopt, 1.0);
    CHECK(g.at(0, 3) > 0.0);
    CHECK(std::isfinite(g.at(0, 3)));
    CHECK(g.at(0, 3) == doctest::Approx(jsd(std::vector<double>{hw[0], hw[1]},
                                            std::vector<double>{sw[0], sw[1]})));
  }
  SUBCASE("a pipeline against itself is zero everywhere") {
    SpuConfig noscale = spu;
    noscale.dynamic_scaling = false;
    for (const SpuConfig &c : {spu, noscale}) {
      const JsdGrid g = jsd_sweep(c, c, 10.0);
      CHECK(g.max() == 0.0);
    }
  }
}
