#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "spusim/experiment.hpp"
#include "spusim/pgm.hpp"
#include "spusim/synthetic.hpp"

namespace spusim::cli {

namespace fs = std::filesystem;

namespace {

/// Bad input the user can fix: exit 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string quote(std::string s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

int fail(std::ostream &err, int code, const std::string &message) {
  err << "error: code=" << code << " kind=" << (code == kExitUsage ? "usage" : "runtime")
      << " message=" << quote(message) << "\n";
  return code;
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct RunArgs {
  std::string spec;
  std::string out;
  int threads = -1;
  bool save_traces = false;
};

int cmd_run(const RunArgs &a, std::ostream &out) {
  if (!fs::exists(a.spec))
    throw UsageError("spec file not found: " + a.spec);
  ExperimentSpec spec = load_experiment_spec(a.spec);
  if (a.threads >= 0)
    spec.threads = a.threads;
  if (a.save_traces)
    spec.save_traces = true;
  const auto result = run_experiment(spec, fs::path(a.out));
  out << "wrote " << (fs::path(a.out) / "report.json").string() << "\n";
  for (const auto &dp : result.report["design_points"]) {
    out << "  " << dp["name"].get<std::string>() << ": ";
    if (dp["status"] != "ok") {
      out << "error: " << dp["error"].get<std::string>() << "\n";
      continue;
    }
    const auto &m = dp["metrics"];
    out << "inactive=" << m["inactive_percentage"].get<double>() << "%"
        << " convergence=" << m["convergence_percentage"].get<double>() << "%"
        << " rmse_median=" << m["rmse"]["median"].get<double>() << "\n";
  }
  return kExitOk;
}

struct JsdArgs {
  JsdSweepSpec spec;
  std::vector<double> temperatures;
  std::string out;
};

int cmd_jsd(JsdArgs a, std::ostream &out) {
  if (!a.temperatures.empty())
    a.spec.temperatures = a.temperatures;
  const Json summary = run_jsd_sweep(a.spec, a.out);
  for (const auto &g : summary["grids"])
    out << g["file"].get<std::string>() << ": max=" << g["max"].get<double>()
        << " mean=" << g["mean"].get<double>() << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string kind = "two-label-denoise";
  SyntheticSpec spec;
  std::string out = ".";
};

int cmd_synth(SynthArgs a, std::ostream &out) {
  try {
    a.spec.kind = parse_synthetic_kind(a.kind);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  std::optional<SyntheticInstance> built;
  try {
    built = build_synthetic_model(a.spec);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  const SyntheticInstance &inst = *built;
  const fs::path dir(a.out);
  fs::create_directories(dir);
  const GridModel &m = inst.model;

  Json doc{{"kind", to_string(a.spec.kind)},
           {"size", a.spec.size},
           {"seed", a.spec.seed},
           {"alpha", m.alpha()},
           {"beta", m.beta()},
           {"noise", a.spec.noise},
           {"width", m.width()},
           {"height", m.height()},
           {"labels", m.label_count()},
           {"pairwise", "potts"}};
  if (a.spec.kind == SyntheticKind::ShiftedStereo)
    doc["shift"] = a.spec.shift;
  doc["singleton"] = std::vector<double>(m.singleton_table().begin(), m.singleton_table().end());
  write_file(dir / "model.json", doc.dump() + "\n");

  if (a.spec.kind == SyntheticKind::TwoLabelDenoise) {
    save_pgm(dir / "observation.pgm", inst.observation);
  } else {
    save_pgm(dir / "left.pgm", inst.observation);
    save_pgm(dir / "right.pgm", inst.right);
  }
  save_pgm(dir / "truth.pgm", label_map_image(inst.truth, m.label_count()));
  out << "wrote synthetic " << to_string(a.spec.kind) << " instance to " << dir.string() << "\n";
  return kExitOk;
}

struct MetricsArgs {
  std::string traces;
  std::string out;
};

int cmd_metrics(const MetricsArgs &a, std::ostream &out) {
  if (!fs::is_directory(a.traces))
    throw UsageError("trace directory not found: " + a.traces);
  const Json result = recompute_metrics(a.traces);
  if (a.out.empty())
    out << result.dump(2) << "\n";
  else
    write_file(a.out, result.dump(2) + "\n");
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Quantized Gibbs-sampling pipeline simulator and statistical robustness metrics",
               "spusim"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto *run_cmd = app.add_subcommand("run", "Run an experiment spec across design points");
  run_cmd->add_option("--spec", run_args.spec, "Experiment spec (JSON)")->required();
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();
  run_cmd->add_option("--threads", run_args.threads, "Worker threads (0 = all cores)");
  run_cmd->add_flag("--save-traces", run_args.save_traces, "Persist per-run trace files");

  JsdArgs jsd_args;
  auto *jsd_cmd = app.add_subcommand("jsd-sweep", "JSD over all binary energy pairs");
  jsd_cmd->add_option("--config", jsd_args.spec.config, "Pipeline design point")
      ->capture_default_str();
  jsd_cmd->add_option("--reference", jsd_args.spec.reference,
                      "Design point to compare against (default: fp64 softmax)");
  jsd_cmd->add_flag("--no-scaling", jsd_args.spec.no_scaling,
                    "Feed raw energies to the LUT (no dynamic scaling)");
  jsd_cmd->add_option("--temperature,-T", jsd_args.temperatures,
                      "Temperature; repeatable (default: 1 and 10)");
  jsd_cmd->add_option("--out", jsd_args.out, "Output directory")->required();

  SynthArgs synth_args;
  auto *synth_cmd = app.add_subcommand("synth", "Emit a synthetic model and its ground truth");
  synth_cmd->add_option("--kind", synth_args.kind, "two-label-denoise | shifted-stereo")
      ->capture_default_str();
  synth_cmd->add_option("--size", synth_args.spec.size)->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.spec.seed)->capture_default_str();
  synth_cmd->add_option("--alpha", synth_args.spec.alpha)->capture_default_str();
  synth_cmd->add_option("--beta", synth_args.spec.beta)->capture_default_str();
  synth_cmd->add_option("--noise", synth_args.spec.noise)->capture_default_str();
  synth_cmd->add_option("--labels", synth_args.spec.labels, "Stereo only")->capture_default_str();
  synth_cmd->add_option("--shift", synth_args.spec.shift, "Stereo only")->capture_default_str();
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->capture_default_str();

  MetricsArgs metrics_args;
  auto *metrics_cmd = app.add_subcommand("metrics", "Recompute metrics from saved traces");
  metrics_cmd->add_option("--traces", metrics_args.traces, "traces/ directory of a run")
      ->required();
  metrics_cmd->add_option("--out", metrics_args.out, "Output JSON (default: stdout)");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("spusim");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &s : storage)
    argv.push_back(s.data());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    return fail(err, kExitUsage, e.what());
  }

  try {
    if (*run_cmd)
      return cmd_run(run_args, out);
    if (*jsd_cmd)
      return cmd_jsd(jsd_args, out);
    if (*synth_cmd)
      return cmd_synth(synth_args, out);
    if (*metrics_cmd)
      return cmd_metrics(metrics_args, out);
  } catch (const UsageError &e) {
    return fail(err, kExitUsage, e.what());
  } catch (const SpecError &e) {
    return fail(err, kExitUsage, e.what());
  } catch (const std::exception &e) {
    return fail(err, kExitRuntime, e.what());
  }
  return fail(err, kExitUsage, "no subcommand given");
}

} // namespace spusim::cli
