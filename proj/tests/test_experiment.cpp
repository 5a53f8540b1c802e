#include <doctest.h>

#include <filesystem>
#include <stdexcept>
#include <fstream>
#include <sstream>

#include "spusim/experiment.hpp"

using namespace spusim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("spusim_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json small_spec(std::vector<std::string> dps) {
  return Json{{"schema_version", 1},
              {"dataset", "tiny"},
              {"model",
               {{"source", "synthetic"},
                {"kind", "two-label-denoise"},
                {"size", 12},
                {"seed", 3},
                {"alpha", 1.0},
                {"beta", 1.0},
                {"noise", 0.1}}},
              {"design_points", dps},
              {"mode", "sampling"},
              {"iterations", 60},
              {"temperature", 1.0},
              {"chains", 4},
              {"runs", 4},
              {"seed", 11},
              {"ess_window", 20}};
}

} // namespace

TEST_CASE("design points expand to pipeline settings") {
  CHECK(design_point("fp64").reference);
  const auto spu = design_point("spu").spu;
  CHECK(spu.p_bits == 4);
  CHECK(spu.pow2_approx);
  CHECK(spu.rng == RngKind::Lfsr19);
  const auto p6a = design_point("p6a").spu;
  CHECK(p6a.p_bits == 6);
  CHECK(p6a.pow2_approx);
  CHECK(p6a.rng == RngKind::Fp64Uniform);
  const auto p8 = design_point("p8").spu;
  CHECK(p8.p_bits == 8);
  CHECK_FALSE(p8.pow2_approx);
  CHECK(design_point("pd").spu.backend == Backend::Fp64);
  CHECK_THROWS_AS(design_point("p5"), SpecError);
  CHECK(design_point_names().size() == 9);
}

TEST_CASE("spec parsing") {
  const auto ok = parse_experiment_spec(small_spec({"spu"}));
  CHECK(ok.protocol.chains == 4);
  CHECK(ok.protocol.burn_in() == 30);
  CHECK(ok.protocol.retained() == 30);

  auto one_chain = small_spec({"spu"});
  one_chain["chains"] = 1;
  CHECK_THROWS_AS(parse_experiment_spec(one_chain), SpecError);

  auto unknown = small_spec({"spu"});
  unknown["colour"] = "blue";
  CHECK_THROWS_AS(parse_experiment_spec(unknown), SpecError);

  auto wrong_type = small_spec({"spu"});
  wrong_type["iterations"] = "many";
  CHECK_THROWS_AS(parse_experiment_spec(wrong_type), SpecError);

  auto bad_dp = small_spec({"p3"});
  CHECK_THROWS_AS(parse_experiment_spec(bad_dp), SpecError);
}

TEST_CASE("pd and fp64 give identical RMSE with shared seeds") {
  auto spec = parse_experiment_spec(small_spec({"pd"}));
  spec.save_label_maps = false;
  const Json report = run_experiment(spec, std::nullopt).report;
  const auto &dps = report["design_points"];
  REQUIRE(dps.size() == 2);
  CHECK(dps[0]["name"] == "fp64");
  CHECK(dps[1]["name"] == "pd");
  CHECK(dps[0]["metrics"]["rmse"] == dps[1]["metrics"]["rmse"]);
  CHECK(dps[0]["metrics"]["convergence_percentage"] == dps[1]["metrics"]["convergence_percentage"]);
}

TEST_CASE("rerunning a spec reproduces report.json byte for byte") {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  auto spec = parse_experiment_spec(small_spec({"spu", "p6", "pd"}));
  spec.threads = 1;
  run_experiment(spec, a);
  spec.threads = 4; // scheduling must not leak into results
  run_experiment(spec, b);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "boxplot.csv") == slurp(b / "boxplot.csv"));
  CHECK(fs::exists(a / "summary.csv"));
  CHECK(fs::exists(a / "metrics" / "spu.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("each run depends only on its own seed") {
  Protocol p;
  p.iterations = 20;
  p.seed = 40;
  const auto model = load_model(parse_experiment_spec(small_spec({"p4"})).model).model;
  // Run 2 of a sweep seeded at 40 equals run 0 of a sweep seeded at 42.
  SpuConfig c = design_point("p4").spu;
  c.run = p.run_config(42);
  const auto direct = spu_run(model, c);
  auto spec = parse_experiment_spec(small_spec({"p4"}));
  spec.protocol.seed = 40;
  spec.protocol.iterations = 20;
  spec.save_traces = true;
  spec.save_label_maps = false;
  const fs::path dir = scratch("seeds");
  run_experiment(spec, dir);
  const std::string bytes = slurp(dir / "traces" / "p4" / "run2.trace");
  CHECK(bytes.size() > 16);
  spec.protocol.seed = 42;
  const fs::path dir2 = scratch("seeds2");
  run_experiment(spec, dir2);
  CHECK(slurp(dir2 / "traces" / "p4" / "run0.trace") == bytes);
  CHECK(direct.trace.length() == std::size_t(p.retained()));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("metrics recomputed from saved traces match the report") {
  auto spec = parse_experiment_spec(small_spec({"spu", "p8a"}));
  spec.save_traces = true;
  const fs::path dir = scratch("recompute");
  const Json report = run_experiment(spec, dir).report;
  const Json again = recompute_metrics(dir / "traces");
  REQUIRE(again["design_points"].size() == report["design_points"].size());
  for (std::size_t i = 0; i < again["design_points"].size(); ++i) {
    CHECK(again["design_points"][i]["name"] == report["design_points"][i]["name"]);
    CHECK(again["design_points"][i]["metrics"] == report["design_points"][i]["metrics"]);
  }
  fs::remove_all(dir);
}

TEST_CASE("an infeasible design point is reported and the rest proceed") {
  Json j = small_spec({"p8", "p4"});
  j["model"] = Json{{"source", "synthetic"}, {"kind", "shifted-stereo"}, {"size", 32},
                    {"labels", 32},          {"alpha", 0.05},          {"beta", 1.0}};
  j["iterations"] = 10;
  const Json report = run_experiment(parse_experiment_spec(j), std::nullopt).report;
  const auto &dps = report["design_points"];
  REQUIRE(dps.size() == 3);
  CHECK(dps[1]["name"] == "p8");
  CHECK(dps[1]["status"] == "error");
  CHECK(dps[2]["status"] == "ok");
}

TEST_CASE("optimization mode end points and ground truth") {
  Json j = small_spec({"p6a"});
  j["mode"] = "optimization";
  j.erase("temperature");
  j["schedule"] = Json{{"t0", 5.0}};
  const Json report = run_experiment(parse_experiment_spec(j), std::nullopt).report;
  const auto &m = report["design_points"][0]["metrics"];
  CHECK(m["endpoint_vs_truth"]["mean_error_rate"].get<double>() < 0.2);
  CHECK(m["rmse"]["values"].size() == 4);
}

TEST_CASE("jsd sweep files") {
  const fs::path dir = scratch("jsd");
  JsdSweepSpec s;
  s.temperatures = {1.0};
  const Json summary = run_jsd_sweep(s, dir);
  REQUIRE(summary["grids"].size() == 1);
  const fs::path csv = dir / summary["grids"][0]["file"].get<std::string>();
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "e0,e1,jsd");
  std::size_t rows = 0;
  while (std::getline(in, line))
    ++rows;
  CHECK(rows == 65536);
  fs::remove_all(dir);

  CHECK(JsdSweepSpec{}.temperatures == std::vector<double>{1.0, 10.0});
}
