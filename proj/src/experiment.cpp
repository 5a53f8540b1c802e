#include "spusim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "spusim/pgm.hpp"
#include "spusim/trace_io.hpp"

namespace spusim {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Design points
// ---------------------------------------------------------------------------

const std::vector<std::string> &design_point_names() {
  static const std::vector<std::string> names = {"fp64", "spu", "p4a", "p6a", "p8a",
                                                 "p4",   "p6",  "p8",  "pd"};
  return names;
}

DesignPoint design_point(std::string_view name) {
  DesignPoint dp;
  dp.name = std::string(name);
  SpuConfig &c = dp.spu;
  if (name == "fp64") {
    dp.reference = true;
    c.backend = Backend::Fp64;
    c.rng = RngKind::Fp64Uniform;
  } else if (name == "spu") {
    c.p_bits = 4;
    c.pow2_approx = true;
    c.rng = RngKind::Lfsr19;
  } else if (name == "pd") {
    c.backend = Backend::Fp64;
    c.rng = RngKind::Fp64Uniform;
  } else if (name.size() >= 2 && name[0] == 'p' &&
             (name[1] == '4' || name[1] == '6' || name[1] == '8') &&
             (name.size() == 2 || (name.size() == 3 && name[2] == 'a'))) {
    c.p_bits = name[1] - '0';
    c.pow2_approx = name.size() == 3;
    c.rng = RngKind::Fp64Uniform;
  } else {
    throw SpecError("unknown design point '" + std::string(name) + "'");
  }
  return dp;
}

Json to_json(const DesignPoint &dp) {
  if (dp.reference)
    return Json{{"sampler", "reference"}, {"rng", "mt19937_64"}};
  Json j{{"sampler", "pipeline"}, {"backend", to_string(dp.spu.backend)}};
  if (dp.spu.backend == Backend::Quantized) {
    j["p_bits"] = dp.spu.p_bits;
    j["pow2_approx"] = dp.spu.pow2_approx;
  }
  j["rng"] = to_string(dp.spu.rng);
  j["dynamic_scaling"] = dp.spu.dynamic_scaling;
  return j;
}

// ---------------------------------------------------------------------------
// Spec parsing
// ---------------------------------------------------------------------------

namespace {

class Fields {
public:
  Fields(const Json &obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj.is_object())
      throw SpecError(where_ + ": expected an object");
  }

  bool has(const char *key) const { return obj_.contains(key); }

  const Json &raw(const char *key) const {
    seen_.insert(key);
    if (!obj_.contains(key))
      throw SpecError(where_ + ": missing required field '" + key + "'");
    return obj_.at(key);
  }

  double number(const char *key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key) && fallback) {
      seen_.insert(key);
      return *fallback;
    }
    const Json &v = raw(key);
    if (!v.is_number())
      throw SpecError(where_ + "." + key + ": expected a number");
    return v.get<double>();
  }

  long long integer(const char *key, std::optional<long long> fallback = std::nullopt) const {
    if (!has(key) && fallback) {
      seen_.insert(key);
      return *fallback;
    }
    const Json &v = raw(key);
    if (!v.is_number_integer())
      throw SpecError(where_ + "." + key + ": expected an integer");
    return v.get<long long>();
  }

  std::uint64_t seed(const char *key, std::uint64_t fallback) const {
    if (!has(key)) {
      seen_.insert(key);
      return fallback;
    }
    const Json &v = raw(key);
    if (v.is_number_unsigned())
      return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
      return std::uint64_t(v.get<long long>());
    throw SpecError(where_ + "." + key + ": expected a nonnegative integer");
  }

  bool boolean(const char *key, bool fallback) const {
    if (!has(key)) {
      seen_.insert(key);
      return fallback;
    }
    const Json &v = raw(key);
    if (!v.is_boolean())
      throw SpecError(where_ + "." + key + ": expected a boolean");
    return v.get<bool>();
  }

  std::string string(const char *key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key) && fallback) {
      seen_.insert(key);
      return *fallback;
    }
    const Json &v = raw(key);
    if (!v.is_string())
      throw SpecError(where_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key()))
        throw SpecError(where_ + ": unknown field '" + it.key() + "'");
  }

private:
  const Json &obj_;
  std::string where_;
  mutable std::set<std::string> seen_;
};

template <class Fn> auto as_spec_error(Fn &&fn) {
  try {
    return fn();
  } catch (const SpecError &) {
    throw;
  } catch (const std::invalid_argument &e) {
    throw SpecError(e.what());
  }
}

ModelSource parse_model(const Json &doc, const fs::path &base_dir) {
  Fields f(doc, "model");
  ModelSource m;
  const std::string source = f.string("source");
  if (source == "synthetic") {
    m.kind = ModelSource::Kind::Synthetic;
    SyntheticSpec &s = m.synthetic;
    s.kind = as_spec_error([&] { return parse_synthetic_kind(f.string("kind")); });
    s.size = int(f.integer("size", 32));
    s.seed = f.seed("seed", 1);
    s.alpha = f.number("alpha", 1.0);
    s.beta = f.number("beta", 1.0);
    s.noise = f.number("noise", 0.1);
    s.labels = int(f.integer("labels", 4));
    s.shift = int(f.integer("shift", 2));
  } else if (source == "stereo_pgm") {
    m.kind = ModelSource::Kind::StereoPgm;
    m.left = base_dir / f.string("left");
    m.right = base_dir / f.string("right");
    m.labels = int(f.integer("labels"));
    m.alpha = f.number("alpha", 1.0);
    m.beta = f.number("beta", 1.0);
  } else {
    throw SpecError("model.source: expected 'synthetic' or 'stereo_pgm'");
  }
  f.reject_unknown();
  return m;
}

Protocol parse_protocol(const Fields &f) {
  Protocol p;
  p.mode = as_spec_error([&] { return parse_mode(f.string("mode", "sampling")); });
  p.iterations = int(f.integer("iterations", 2000));
  p.temperature = f.number("temperature", 1.0);
  if (f.has("schedule")) {
    Fields s(f.raw("schedule"), "schedule");
    p.t0 = s.number("t0", 10.0);
    p.decay = s.number("decay", 0.0);
    s.reject_unknown();
  }
  p.chains = int(f.integer("chains", 10));
  p.runs = int(f.integer("runs", 10));
  p.seed = f.seed("seed", 1);
  p.burn_in_fraction = f.number("burn_in_fraction", 0.5);
  p.ess_window = int(f.integer("ess_window", 1000));
  p.rhat_threshold = f.number("rhat_threshold", kRhatThreshold);

  if (p.chains < 2)
    throw SpecError("chains must be at least 2 for the convergence diagnostic");
  if (p.runs < 1)
    throw SpecError("runs must be at least 1");
  if (p.iterations < 1)
    throw SpecError("iterations must be positive");
  if (!(p.burn_in_fraction >= 0.0 && p.burn_in_fraction < 1.0))
    throw SpecError("burn_in_fraction must be in [0, 1)");
  if (p.retained() < 4)
    throw SpecError("fewer than 4 samples remain after burn-in");
  if (p.ess_window < 4)
    throw SpecError("ess_window must be at least 4");
  if (!(p.rhat_threshold > 1.0))
    throw SpecError("rhat_threshold must exceed 1");
  as_spec_error([&] {
    validate(p.run_config(p.seed));
    return 0;
  });
  return p;
}

} // namespace

RunConfig Protocol::run_config(std::uint64_t run_seed) const {
  RunConfig rc;
  rc.mode = mode;
  rc.iterations = iterations;
  rc.temperature = temperature;
  rc.t0 = t0;
  rc.decay = decay;
  rc.seed = run_seed;
  rc.collect_last = retained();
  rc.energy = EnergyInput::Quantized8;
  return rc;
}

ExperimentSpec parse_experiment_spec(const Json &doc, const fs::path &base_dir) {
  Fields f(doc, "spec");
  ExperimentSpec spec;
  spec.schema_version = int(f.integer("schema_version"));
  if (spec.schema_version != kSpecSchemaVersion)
    throw SpecError("unsupported schema_version " + std::to_string(spec.schema_version));
  spec.dataset = f.string("dataset", "synthetic");
  spec.model = parse_model(f.raw("model"), base_dir);

  const Json &dps = f.raw("design_points");
  if (!dps.is_array() || dps.empty())
    throw SpecError("design_points: expected a nonempty array");
  std::set<std::string> seen;
  for (const auto &d : dps) {
    if (!d.is_string())
      throw SpecError("design_points: entries must be strings");
    const auto name = d.get<std::string>();
    design_point(name);
    if (!seen.insert(name).second)
      throw SpecError("design_points: duplicate '" + name + "'");
    spec.design_points.push_back(name);
  }

  spec.protocol = parse_protocol(f);
  spec.save_traces = f.boolean("save_traces", false);
  spec.save_label_maps = f.boolean("save_label_maps", true);
  spec.threads = int(f.integer("threads", 0));
  if (spec.threads < 0)
    throw SpecError("threads must be nonnegative");
  f.reject_unknown();
  return spec;
}

ExperimentSpec load_experiment_spec(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw SpecError("cannot open spec file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  return parse_experiment_spec(doc, path.parent_path());
}

Json to_json(const Protocol &p) {
  Json j{{"mode", to_string(p.mode)},
         {"iterations", p.iterations}};
  if (p.mode == Mode::Sampling) {
    j["temperature"] = p.temperature;
  } else {
    RunConfig rc = p.run_config(p.seed);
    j["schedule"] = Json{{"t0", p.t0}, {"decay", effective_decay(rc)}};
  }
  j["chains"] = p.chains;
  j["runs"] = p.runs;
  j["seed"] = p.seed;
  j["burn_in_fraction"] = p.burn_in_fraction;
  j["burn_in"] = p.burn_in();
  j["retained"] = p.retained();
  j["ess_window"] = std::min(p.ess_window, p.retained());
  j["rhat_threshold"] = p.rhat_threshold;
  return j;
}

namespace {

Protocol protocol_from_json(const Json &j) {
  Protocol p;
  p.mode = parse_mode(j.at("mode").get<std::string>());
  p.iterations = j.at("iterations").get<int>();
  if (p.mode == Mode::Sampling) {
    p.temperature = j.at("temperature").get<double>();
  } else {
    p.t0 = j.at("schedule").at("t0").get<double>();
    p.decay = j.at("schedule").at("decay").get<double>();
  }
  p.chains = j.at("chains").get<int>();
  p.runs = j.at("runs").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.burn_in_fraction = j.at("burn_in_fraction").get<double>();
  p.ess_window = j.at("ess_window").get<int>();
  p.rhat_threshold = j.at("rhat_threshold").get<double>();
  return p;
}

} // namespace

LoadedModel load_model(const ModelSource &source) {
  if (source.kind == ModelSource::Kind::Synthetic) {
    SyntheticInstance inst = as_spec_error([&] { return build_synthetic_model(source.synthetic); });
    return LoadedModel{std::move(inst.model), std::move(inst.truth)};
  }
  const GrayImage left = load_pgm(source.left);
  const GrayImage right = load_pgm(source.right);
  return LoadedModel{build_stereo_model(left, right, source.labels, source.alpha, source.beta),
                     std::nullopt};
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

LabelField end_point(const SampleTrace &trace, Mode mode) {
  return mode == Mode::Sampling ? mode_estimate(trace) : trace.last_sweep();
}

namespace {

std::size_t ess_window(const Protocol &p) {
  return std::size_t(std::min(p.ess_window, p.retained()));
}

double error_rate(const LabelField &a, const LabelField &b) {
  std::size_t wrong = 0;
  for (std::size_t v = 0; v < a.size(); ++v)
    wrong += a[v] != b[v] ? 1 : 0;
  return double(wrong) / double(a.size());
}

} // namespace

Baseline make_baseline(std::span<const SampleTrace> fp64_traces, const Protocol &protocol) {
  if (fp64_traces.size() < std::size_t(protocol.runs))
    throw std::invalid_argument("baseline needs one trace per run");
  Baseline b;
  std::vector<LabelField> ends;
  for (int i = 0; i < protocol.runs; ++i) {
    b.ess.push_back(ess_all(fp64_traces[i], ess_window(protocol)));
    ends.push_back(end_point(fp64_traces[i], protocol.mode));
  }
  b.reference = reference_mode(ends);
  return b;
}

Json design_point_metrics(std::span<const SampleTrace> traces, const Baseline &baseline,
                          const Protocol &protocol, const std::optional<LabelField> &truth,
                          Json *detail) {
  if (traces.size() < std::size_t(protocol.executed_runs()))
    throw std::invalid_argument("design point is missing traces");

  // Sampling quality.
  double overall_sum = 0.0, inactive_sum = 0.0, sw_sum = 0.0, hw_sum = 0.0;
  int overall_defined = 0, active_defined = 0;
  Json ess_detail = Json::array();
  for (int i = 0; i < protocol.runs; ++i) {
    const EssResult e = ess_all(traces[i], ess_window(protocol));
    if (e.mean_overall_ess) {
      overall_sum += *e.mean_overall_ess;
      ++overall_defined;
    }
    inactive_sum += e.inactive_percentage;
    const ActiveEss a = mean_active_ess(baseline.ess[i], e);
    if (a.sw_mean) {
      sw_sum += *a.sw_mean;
      hw_sum += *a.hw_mean;
      ++active_defined;
    }
    if (detail)
      ess_detail.push_back(to_json(e));
  }

  Json active{{"runs_defined", active_defined}};
  if (active_defined > 0) {
    active["sw"] = sw_sum / active_defined;
    active["hw"] = hw_sum / active_defined;
  } else {
    active["sw"] = nullptr;
    active["hw"] = nullptr;
    active["reason"] = "no variable is active in both the software and this design point";
  }

  // Convergence.
  const ConvergenceResult conv =
      convergence(traces.subspan(0, std::size_t(protocol.chains)), 0, protocol.rhat_threshold);

  // Goodness of fit.
  std::vector<double> rmse_values;
  double truth_rmse = 0.0, truth_err = 0.0;
  for (int i = 0; i < protocol.runs; ++i) {
    const LabelField end = end_point(traces[i], protocol.mode);
    rmse_values.push_back(rmse(end, baseline.reference));
    if (truth) {
      truth_rmse += rmse(end, *truth);
      truth_err += error_rate(end, *truth);
    }
  }
  Json rmse_json = to_json(box_summary(rmse_values));
  rmse_json["values"] = rmse_values;

  Json m;
  m["mean_overall_ess"] =
      overall_defined ? Json(overall_sum / overall_defined) : Json(nullptr);
  m["mean_active_ess"] = std::move(active);
  m["inactive_percentage"] = inactive_sum / protocol.runs;
  m["convergence_percentage"] = conv.convergence_percentage;
  m["rmse"] = std::move(rmse_json);
  m["endpoint_vs_truth"] = truth ? Json{{"mean_rmse", truth_rmse / protocol.runs},
                                        {"mean_error_rate", truth_err / protocol.runs}}
                                 : Json(nullptr);
  if (detail)
    *detail = Json{{"ess", std::move(ess_detail)}, {"convergence", to_json(conv)}};
  return m;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

namespace {

void parallel_for(int count, int threads, const std::function<void(int)> &fn) {
  if (threads <= 0)
    threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

std::vector<SampleTrace> run_design_point(const GridModel &model, const DesignPoint &dp,
                                          const Protocol &protocol, int threads) {
  std::vector<SampleTrace> traces(protocol.executed_runs());
  parallel_for(protocol.executed_runs(), threads, [&](int i) {
    const RunConfig rc = protocol.run_config(protocol.seed + std::uint64_t(i));
    if (dp.reference) {
      traces[i] = run_reference(model, rc).trace;
    } else {
      SpuConfig cfg = dp.spu;
      cfg.run = rc;
      traces[i] = spu_run(model, cfg).trace;
    }
  });
  return traces;
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

std::string csv_number(const Json &v) {
  if (v.is_null())
    return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

GrayImage raw_label_image(const LabelField &field) {
  GrayImage img{field.width(), field.height(), std::vector<std::uint8_t>(field.size())};
  for (std::size_t v = 0; v < field.size(); ++v)
    img.pixels[v] = std::uint8_t(field[v]);
  return img;
}

LabelField label_field_from_image(const GrayImage &img) {
  std::vector<Label> labels(img.pixels.begin(), img.pixels.end());
  return LabelField(img.width, img.height, std::move(labels));
}

} // namespace

ExperimentOutput run_experiment(const ExperimentSpec &spec,
                                const std::optional<fs::path> &out_dir) {
  const LoadedModel loaded = load_model(spec.model);
  const GridModel &model = loaded.model;
  const Protocol &protocol = spec.protocol;

  std::vector<std::string> names = {"fp64"};
  for (const auto &n : spec.design_points)
    if (n != "fp64")
      names.push_back(n);

  if (out_dir) {
    fs::create_directories(*out_dir / "metrics");
    if (spec.save_traces)
      fs::create_directories(*out_dir / "traces");
    if (spec.save_label_maps)
      fs::create_directories(*out_dir / "labelmaps");
  }

  Json report;
  report["schema"] = kReportSchema;
  report["dataset"] = spec.dataset;
  report["model"] = Json{{"width", model.width()},
                         {"height", model.height()},
                         {"labels", model.label_count()},
                         {"alpha", model.alpha()},
                         {"beta", model.beta()},
                         {"ground_truth", loaded.truth.has_value()}};
  report["protocol"] = to_json(protocol);
  report["design_points"] = Json::array();

  Json manifest{{"schema", "spusim.traces/1"},
                {"dataset", spec.dataset},
                {"protocol", to_json(protocol)},
                {"design_points", Json::array()},
                {"truth", nullptr}};
  if (out_dir && spec.save_traces && loaded.truth) {
    save_pgm(*out_dir / "traces" / "truth_labels.pgm", raw_label_image(*loaded.truth));
    manifest["truth"] = "truth_labels.pgm";
  }

  std::optional<Baseline> baseline;
  for (const auto &name : names) {
    const DesignPoint dp = design_point(name);
    Json entry{{"name", name}, {"config", to_json(dp)}};
    if (!dp.reference) {
      SpuConfig cfg = dp.spu;
      cfg.run = protocol.run_config(protocol.seed);
      try {
        validate(cfg, model.label_count());
      } catch (const ConfigError &e) {
        entry["status"] = "error";
        entry["error"] = e.what();
        report["design_points"].push_back(std::move(entry));
        continue;
      }
    }

    const std::vector<SampleTrace> traces = run_design_point(model, dp, protocol, spec.threads);
    if (dp.reference)
      baseline = make_baseline(traces, protocol);

    Json detail;
    entry["status"] = "ok";
    entry["metrics"] =
        design_point_metrics(traces, *baseline, protocol, loaded.truth, out_dir ? &detail : nullptr);
    report["design_points"].push_back(std::move(entry));

    if (!out_dir)
      continue;
    write_text(*out_dir / "metrics" / (name + ".json"), detail.dump() + "\n");
    if (spec.save_traces) {
      const fs::path dir = *out_dir / "traces" / name;
      fs::create_directories(dir);
      for (std::size_t i = 0; i < traces.size(); ++i)
        save_trace(dir / ("run" + std::to_string(i) + ".trace"), traces[i]);
      manifest["design_points"].push_back(Json{{"name", name}, {"runs", traces.size()}});
    }
    if (spec.save_label_maps) {
      save_pgm(*out_dir / "labelmaps" / (name + "_run0.pgm"),
               label_map_image(end_point(traces[0], protocol.mode), model.label_count()));
      if (dp.reference)
        save_pgm(*out_dir / "labelmaps" / "reference.pgm",
                 label_map_image(baseline->reference, model.label_count()));
    }
  }

  if (out_dir) {
    write_text(*out_dir / "report.json", report.dump(2) + "\n");
    if (spec.save_traces)
      write_text(*out_dir / "traces" / "manifest.json", manifest.dump(2) + "\n");
    if (spec.save_label_maps && loaded.truth)
      save_pgm(*out_dir / "labelmaps" / "truth.pgm",
               label_map_image(*loaded.truth, model.label_count()));

    std::string summary = "design_point,status,mean_overall_ess,mean_active_ess_sw,"
                          "mean_active_ess_hw,inactive_percentage,convergence_percentage,"
                          "rmse_median\n";
    std::string box = "design_point,dataset,min,q25,median,q75,max,n_outliers\n";
    for (const auto &e : report["design_points"]) {
      const std::string name = e["name"].get<std::string>();
      if (e["status"] != "ok") {
        summary += name + ",error,,,,,,\n";
        continue;
      }
      const Json &m = e["metrics"];
      summary += name + ",ok," + csv_number(m["mean_overall_ess"]) + "," +
                 csv_number(m["mean_active_ess"]["sw"]) + "," +
                 csv_number(m["mean_active_ess"]["hw"]) + "," +
                 csv_number(m["inactive_percentage"]) + "," +
                 csv_number(m["convergence_percentage"]) + "," +
                 csv_number(m["rmse"]["median"]) + "\n";
      const Json &r = m["rmse"];
      box += name + "," + spec.dataset + "," + csv_number(r["min"]) + "," + csv_number(r["q25"]) +
             "," + csv_number(r["median"]) + "," + csv_number(r["q75"]) + "," +
             csv_number(r["max"]) + "," + std::to_string(r["n_outliers"].get<std::size_t>()) + "\n";
    }
    write_text(*out_dir / "summary.csv", summary);
    write_text(*out_dir / "boxplot.csv", box);
  }
  return ExperimentOutput{std::move(report)};
}

Json recompute_metrics(const fs::path &traces_dir) {
  std::ifstream in(traces_dir / "manifest.json");
  if (!in)
    throw SpecError("no manifest.json in " + traces_dir.string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw SpecError(std::string("manifest is not valid JSON: ") + e.what());
  }
  Protocol protocol;
  std::optional<LabelField> truth;
  try {
    protocol = protocol_from_json(manifest.at("protocol"));
    if (!manifest.at("truth").is_null())
      truth = label_field_from_image(
          load_pgm(traces_dir / manifest.at("truth").get<std::string>()));
  } catch (const nlohmann::json::exception &e) {
    throw SpecError(std::string("manifest schema violation: ") + e.what());
  }

  auto load_runs = [&](const std::string &name, std::size_t runs) {
    std::vector<SampleTrace> traces;
    for (std::size_t i = 0; i < runs; ++i)
      traces.push_back(load_trace(traces_dir / name / ("run" + std::to_string(i) + ".trace")));
    return traces;
  };

  std::optional<Baseline> baseline;
  Json out{{"dataset", manifest.value("dataset", "")}, {"design_points", Json::array()}};
  for (const auto &d : manifest.at("design_points")) {
    const std::string name = d.at("name").get<std::string>();
    const auto traces = load_runs(name, d.at("runs").get<std::size_t>());
    if (name == "fp64")
      baseline = make_baseline(traces, protocol);
    if (!baseline)
      throw SpecError("manifest must list fp64 first");
    out["design_points"].push_back(
        Json{{"name", name}, {"metrics", design_point_metrics(traces, *baseline, protocol, truth)}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSD sweep
// ---------------------------------------------------------------------------

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Json run_jsd_sweep(const JsdSweepSpec &spec, const fs::path &out_dir) {
  DesignPoint dp = design_point(spec.config);
  if (dp.reference)
    throw SpecError("jsd-sweep config must be a pipeline design point");
  dp.spu.dynamic_scaling = !spec.no_scaling;

  std::optional<SpuConfig> reference;
  std::string ref_name = spec.reference.empty() ? "fp64" : spec.reference;
  if (ref_name != "fp64")
    reference = design_point(ref_name).spu;
  if (spec.temperatures.empty())
    throw SpecError("at least one temperature is required");
  for (double t : spec.temperatures)
    if (!(t > 0.0))
      throw SpecError("temperatures must be positive");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  const std::string label = spec.config + (spec.no_scaling ? "_noscale" : "");
  Json grids = Json::array();
  for (double t : spec.temperatures) {
    const JsdGrid grid = jsd_sweep(dp.spu, reference, t);
    const std::string file = "jsd_" + label + "_vs_" + ref_name + "_T" + format_number(t) + ".csv";
    write_jsd_csv(out_dir / file, grid);
    grids.push_back(Json{{"config", label},
                         {"reference", ref_name},
                         {"temperature", t},
                         {"file", file},
                         {"max", grid.max()},
                         {"mean", grid.mean()},
                         {"cells_above_0.2", grid.count_above(0.2)}});
  }
  Json summary{{"grids", std::move(grids)}};
  write_text(out_dir / ("jsd_" + label + "_vs_" + ref_name + "_summary.json"),
             summary.dump(2) + "\n");
  return summary;
}

} // namespace spusim
