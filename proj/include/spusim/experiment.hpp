#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spusim/jsd_sweep.hpp"
#include "spusim/metrics.hpp"
#include "spusim/report.hpp"
#include "spusim/spu_pipeline.hpp"
#include "spusim/synthetic.hpp"

namespace spusim {

/// Experiment spec does not match the schema (missing field, wrong type, bad value).
class SpecError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kSpecSchemaVersion = 1;
inline constexpr std::string_view kReportSchema = "spusim.report/1";

/// A named configuration. "fp64" is the software reference sampler; the rest
/// expand to pipeline settings:
///   spu  = 4-bit, 2^n, LFSR          pNa = N-bit, 2^n, FP64 uniform
///   pN   = N-bit, no 2^n, FP64 uniform   pd  = FP64 back-end
struct DesignPoint {
  std::string name;
  bool reference = false;
  SpuConfig spu;
};

DesignPoint design_point(std::string_view name);
const std::vector<std::string> &design_point_names();

Json to_json(const DesignPoint &dp);

struct ModelSource {
  enum class Kind { Synthetic, StereoPgm };
  Kind kind = Kind::Synthetic;
  SyntheticSpec synthetic;
  // StereoPgm; relative paths resolve against the spec file's directory.
  std::filesystem::path left, right;
  int labels = 4;
  double alpha = 1.0;
  double beta = 1.0;
};

/// Run protocol; defaults mirror the multi-run methodology (10 runs, first
/// half discarded, last 1000 samples for ESS, R-hat < 1.1).
struct Protocol {
  Mode mode = Mode::Sampling;
  int iterations = 2000;
  double temperature = 1.0;
  double t0 = 10.0;
  double decay = 0.0;
  int chains = 10;
  int runs = 10;
  std::uint64_t seed = 1;
  double burn_in_fraction = 0.5;
  int ess_window = 1000;
  double rhat_threshold = kRhatThreshold;

  int burn_in() const { return int(double(iterations) * burn_in_fraction); }
  int retained() const { return iterations - burn_in(); }
  int executed_runs() const { return std::max(chains, runs); }
  RunConfig run_config(std::uint64_t run_seed) const;
};

struct ExperimentSpec {
  int schema_version = kSpecSchemaVersion;
  std::string dataset = "synthetic";
  ModelSource model;
  std::vector<std::string> design_points;
  Protocol protocol;
  bool save_traces = false;
  bool save_label_maps = true;
  int threads = 0; // 0 = hardware concurrency
};

/// Throws SpecError on schema violations.
ExperimentSpec parse_experiment_spec(const Json &doc,
                                     const std::filesystem::path &base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path &path);
Json to_json(const Protocol &protocol);

struct LoadedModel {
  GridModel model;
  std::optional<LabelField> truth;
};

LoadedModel load_model(const ModelSource &source);

/// Per-variable summaries of the software baseline every design point is compared to.
struct Baseline {
  std::vector<EssResult> ess; // one per run
  LabelField reference;       // mode of the software end points
};

/// End point of one run: the modal label of the retained samples in sampling
/// mode, the final sweep in optimization mode.
LabelField end_point(const SampleTrace &trace, Mode mode);

Baseline make_baseline(std::span<const SampleTrace> fp64_traces, const Protocol &protocol);

/// All report metrics of one design point, computed from its retained traces.
/// `detail`, when given, receives the per-variable ESS and R-hat arrays.
Json design_point_metrics(std::span<const SampleTrace> traces, const Baseline &baseline,
                          const Protocol &protocol, const std::optional<LabelField> &truth,
                          Json *detail = nullptr);

struct ExperimentOutput {
  Json report;
  // Also written to disk when an output directory is given.
};

/// Runs every design point (fp64 is always included and runs first) and
/// writes report.json, summary.csv, boxplot.csv, metrics/<dp>.json and,
/// optionally, traces/ and labelmaps/ under `out_dir`.
ExperimentOutput run_experiment(const ExperimentSpec &spec,
                                const std::optional<std::filesystem::path> &out_dir);

/// Recomputes the metrics block of a report from a saved traces/ directory.
Json recompute_metrics(const std::filesystem::path &traces_dir);

struct JsdSweepSpec {
  std::string config = "spu";
  // Empty: the FP64 softmax. Otherwise a design point name.
  std::string reference;
  // Model the earlier pipeline without dynamic scaling.
  bool no_scaling = false;
  std::vector<double> temperatures = {1.0, 10.0};
};

/// Writes jsd_<config>_T<t>.csv per temperature plus jsd_summary.json (max/mean per grid).
Json run_jsd_sweep(const JsdSweepSpec &spec, const std::filesystem::path &out_dir);

/// Fixed-precision decimal for file names and CSV cells.
std::string format_number(double v);

} // namespace spusim
