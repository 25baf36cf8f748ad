// driftgate: prequential simulator for online commit-level defect prediction
// under delayed and human-in-the-loop labeling.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "driftgate/dataset.hpp"
#include "driftgate/error.hpp"
#include "driftgate/format.hpp"
#include "driftgate/harness.hpp"
#include "driftgate/labeling.hpp"
#include "driftgate/learners.hpp"
#include "driftgate/parallel.hpp"
#include "driftgate/svg.hpp"
#include "driftgate/trace_io.hpp"
#include "driftgate/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dg = driftgate;

namespace {

[[noreturn]] void usage_error(const std::string& msg) {
  dg::raise(dg::ErrorKind::bad_config, msg);
}

// ---------------------------------------------------------------------------
// Durations: bare numbers are seconds; `d`/`h` suffixes scale; `inf` lifts
// the BFC window entirely.

std::int64_t parse_duration_s(const std::string& text) {
  if (text == "inf") return dg::kForever;
  if (text.empty()) usage_error("empty duration");
  double scale = 1.0;
  std::string number = text;
  const char suffix = text.back();
  if (suffix == 'd' || suffix == 'h') {
    scale = suffix == 'd' ? 86400.0 : 3600.0;
    number = text.substr(0, text.size() - 1);
  }
  double value = 0.0;
  if (!dg::parse_double(number, value) || value < 0.0)
    usage_error("bad duration '" + text + "'");
  const double seconds = value * scale;
  if (seconds >= static_cast<double>(dg::kForever)) return dg::kForever;
  return static_cast<std::int64_t>(std::llround(seconds));
}

double parse_duration_days(const std::string& text) {
  const std::int64_t s = parse_duration_s(text);
  if (s == dg::kForever) usage_error("grid values must be finite");
  return static_cast<double>(s) / 86400.0;
}

std::int64_t duration_from_json(const json& v, const char* key) {
  if (v.is_string()) return parse_duration_s(v.get<std::string>());
  if (v.is_number())
    return static_cast<std::int64_t>(std::llround(v.get<double>()));
  usage_error(std::string(key) + " must be a number of seconds or a duration string");
}

json duration_to_json(std::int64_t seconds) {
  if (seconds == dg::kForever) return json("inf");
  return json(seconds);
}

// ---------------------------------------------------------------------------
// JSON plumbing: defaults <- config file <- command-line flags, merged most
// specific last. Objects merge recursively; everything else replaces.

void deep_merge(json& base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) dg::raise(dg::ErrorKind::io_error, "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    dg::raise(dg::ErrorKind::bad_config, "invalid json in " + path);
  return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    dg::raise(dg::ErrorKind::io_error, "cannot open " + path.string());
  out << text;
  out.flush();
  if (!out) dg::raise(dg::ErrorKind::io_error, "write failed " + path.string());
}

// ---------------------------------------------------------------------------
// Config <-> JSON.

json features_to_json(const dg::Features& f) {
  json arr = json::array();
  for (double v : f) arr.push_back(v);
  return arr;
}

dg::Features features_from_json(const json& arr, const char* key) {
  if (!arr.is_array() || arr.size() != dg::kFeatureCount)
    usage_error(std::string(key) + " must be an array of " +
                std::to_string(dg::kFeatureCount) + " numbers");
  dg::Features f{};
  for (std::size_t i = 0; i < dg::kFeatureCount; ++i) f[i] = arr[i].get<double>();
  return f;
}

const char* to_string(dg::DelayKind kind) {
  switch (kind) {
    case dg::DelayKind::log_normal: return "log_normal";
    case dg::DelayKind::exponential: return "exponential";
    case dg::DelayKind::fixed: return "fixed";
  }
  return "?";
}

dg::DelayKind delay_kind_from_json(const json& v) {
  const std::string s = v.get<std::string>();
  if (s == "log_normal") return dg::DelayKind::log_normal;
  if (s == "exponential") return dg::DelayKind::exponential;
  if (s == "fixed") return dg::DelayKind::fixed;
  usage_error("unknown fix-delay kind '" + s + "'");
}

json synth_to_json(const dg::SynthSpec& spec) {
  json drift = json::array();
  for (const dg::DriftPoint& p : spec.drift_points)
    drift.push_back({{"at", p.at_index},
                     {"clean_mean", features_to_json(p.clean_mean)},
                     {"defect_mean", features_to_json(p.defect_mean)}});
  return {{"n", spec.n_instances},
          {"defect_rate", spec.defect_rate},
          {"fix_delay",
           {{"kind", to_string(spec.fix_delay.kind)},
            {"mean_days", spec.fix_delay.mean_days},
            {"dispersion", spec.fix_delay.dispersion}}},
          {"inter_arrival_mean_s", spec.inter_arrival_mean_s},
          {"start_time", spec.start_time},
          {"feature_sigma", spec.feature_sigma},
          {"clean_mean", features_to_json(spec.clean_mean)},
          {"defect_mean", features_to_json(spec.defect_mean)},
          {"drift_points", drift}};
}

dg::SynthSpec synth_from_json(const json& j) {
  dg::SynthSpec spec;
  if (j.contains("n")) spec.n_instances = j["n"].get<std::size_t>();
  if (j.contains("defect_rate")) spec.defect_rate = j["defect_rate"].get<double>();
  if (j.contains("fix_delay")) {
    const json& fd = j["fix_delay"];
    if (fd.contains("kind")) spec.fix_delay.kind = delay_kind_from_json(fd["kind"]);
    if (fd.contains("mean_days"))
      spec.fix_delay.mean_days = fd["mean_days"].get<double>();
    if (fd.contains("dispersion"))
      spec.fix_delay.dispersion = fd["dispersion"].get<double>();
  }
  if (j.contains("inter_arrival_mean_s"))
    spec.inter_arrival_mean_s = j["inter_arrival_mean_s"].get<double>();
  if (j.contains("start_time"))
    spec.start_time = j["start_time"].get<std::int64_t>();
  if (j.contains("feature_sigma"))
    spec.feature_sigma = j["feature_sigma"].get<double>();
  if (j.contains("clean_mean"))
    spec.clean_mean = features_from_json(j["clean_mean"], "clean_mean");
  if (j.contains("defect_mean"))
    spec.defect_mean = features_from_json(j["defect_mean"], "defect_mean");
  if (j.contains("drift_points")) {
    for (const json& p : j["drift_points"]) {
      dg::DriftPoint dp;
      dp.at_index = p.at("at").get<std::size_t>();
      dp.clean_mean = features_from_json(p.at("clean_mean"), "clean_mean");
      dp.defect_mean = features_from_json(p.at("defect_mean"), "defect_mean");
      spec.drift_points.push_back(dp);
    }
  }
  return spec;
}

json default_learner_json(const char* kind) {
  return {{"kind", kind},        {"n_models", 10},    {"lambda", 6.0},
          {"resample_rate", 1},  {"delta", 1e-7},     {"grace", 200.0},
          {"tie", 0.05},         {"standardize", false}, {"noise_p", 0.0}};
}

dg::LearnerConfig learner_from_json(const json& j, std::uint64_t seed) {
  dg::LearnerConfig cfg;
  if (!dg::learner_kind_from_string(j.at("kind").get<std::string>(), cfg.kind))
    usage_error("unknown learner '" + j.at("kind").get<std::string>() + "'");
  cfg.ensemble.n_models = j.at("n_models").get<int>();
  cfg.ensemble.lambda = j.at("lambda").get<double>();
  cfg.ensemble.resample_rate = j.at("resample_rate").get<int>();
  cfg.hoeffding.delta = j.at("delta").get<double>();
  cfg.hoeffding.grace_period = j.at("grace").get<double>();
  cfg.hoeffding.tie_threshold = j.at("tie").get<double>();
  cfg.standardize = j.at("standardize").get<bool>();
  cfg.noise_p = j.at("noise_p").get<double>();
  cfg.seed = seed;
  dg::validate(cfg);
  return cfg;
}

json default_labeling_json() {
  return {{"mode", nullptr},
          {"wqa", 7 * dg::kSecondsPerDay},
          {"wbfc", 15 * dg::kSecondsPerDay},
          {"sqa_error_rate", 0.0}};
}

dg::LabelingConfig labeling_from_json(const json& j) {
  if (!j.contains("mode") || j["mode"].is_null())
    usage_error("--mode is required (ideal, non_hitl, or hitl)");
  dg::LabelingConfig cfg;
  if (!dg::labeling_mode_from_string(j["mode"].get<std::string>(), cfg.mode))
    usage_error("unknown mode '" + j["mode"].get<std::string>() + "'");
  cfg.w_qa = duration_from_json(j.at("wqa"), "wqa");
  cfg.w_bfc = duration_from_json(j.at("wbfc"), "wbfc");
  cfg.sqa_error_rate = j.at("sqa_error_rate").get<double>();
  dg::validate(cfg);
  return cfg;
}

dg::ValidationConfig validation_from_json(const json& j, std::uint64_t seed) {
  dg::ValidationConfig cfg;
  if (!dg::strategy_from_string(j.at("strategy").get<std::string>(),
                                cfg.strategy))
    usage_error("unknown strategy '" + j.at("strategy").get<std::string>() + "'");
  cfg.k = j.at("folds").get<int>();
  cfg.seed = seed;
  dg::validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Effective run description shared by the subcommands.

struct Run {
  std::string command;
  json effective;            // the config echo, minus "command"
  fs::path out;
  int threads = 1;

  std::uint64_t seed() const { return effective.at("seed").get<std::uint64_t>(); }
  double alpha() const { return effective.at("alpha").get<double>(); }
  int checkpoints() const { return effective.at("checkpoints").get<int>(); }

  dg::CommitStream stream() const {
    if (effective.contains("dataset"))
      return dg::load_commit_stream(effective["dataset"].get<std::string>());
    return dg::synth_stream(synth_from_json(effective.at("synth")), seed());
  }
  dg::LearnerConfig learner() const {
    return learner_from_json(effective.at("learner"), seed());
  }
  dg::ValidationConfig validation() const {
    return validation_from_json(effective.at("validation"), seed());
  }
  dg::LabelingConfig labeling(const char* key = "labeling") const {
    return labeling_from_json(effective.at(key));
  }

  fs::path file(const std::string& name) const { return out / name; }

  void write_echo_and_manifest(std::vector<std::string> files) const {
    json echo = effective;
    echo["command"] = command;
    write_text_file(file("config.json"), echo.dump(2) + "\n");
    files.insert(files.begin(), "config.json");
    json manifest = {{"files", files}};
    write_text_file(file("manifest.json"), manifest.dump(2) + "\n");
  }
};

// ---------------------------------------------------------------------------
// Chart rendering. Charts are always rebuilt from the CSV files so every
// plotted number is derivable from (in fact, parsed out of) the CSV bytes.

std::vector<std::size_t> stride_indices(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  const std::size_t stride = n <= cap ? 1 : (n + cap - 1) / cap;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

dg::Series sampled_series(std::string name, const std::vector<double>& x,
                          const std::vector<double>& y) {
  dg::Series s{std::move(name), {}, {}};
  for (std::size_t i : stride_indices(x.size(), 960)) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
  }
  return s;
}

void chart_checkpoints(const fs::path& csv, const fs::path& svg) {
  const dg::CsvTable t = dg::read_csv(csv.string());
  const auto index = t.numeric_column("commit_index");
  const auto gmean = t.numeric_column("gmean");
  // Rows are grouped by checkpoint; average the folds at each one.
  dg::Series mean{"mean G-mean", {}, {}};
  std::size_t i = 0;
  while (i < index.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < index.size() && index[j] == index[i]) sum += gmean[j++];
    mean.x.push_back(index[i]);
    mean.y.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  dg::ChartSpec spec{"Prequential G-mean", "commit", "G-mean", 0.0, 1.0, {}};
  dg::write_line_chart(spec, {mean}, svg.string());
}

void chart_compare(const fs::path& csv, const fs::path& svg) {
  const dg::CsvTable t = dg::read_csv(csv.string());
  const auto index = t.numeric_column("commit_index");
  dg::Series a{"gmean_a", index, t.numeric_column("gmean_a")};
  dg::Series b{"gmean_b", index, t.numeric_column("gmean_b")};
  dg::ChartSpec spec{"Prequential G-mean", "commit", "G-mean", 0.0, 1.0, {}};
  dg::write_line_chart(spec, {a, b}, svg.string());
}

void chart_tests(const fs::path& csv, const fs::path& svg) {
  const dg::CsvTable t = dg::read_csv(csv.string());
  dg::Series p{"p-value", t.numeric_column("commit_index"),
               t.numeric_column("p_value")};
  dg::ChartSpec spec{"Paired signed-rank p-value", "commit", "p-value",
                     0.0,         1.0,              0.05};
  dg::write_line_chart(spec, {p}, svg.string());
}

void chart_validity(const fs::path& csv, const fs::path& svg) {
  const dg::CsvTable t = dg::read_csv(csv.string());
  const auto index = t.numeric_column("commit_index");
  std::vector<dg::Series> series{
      sampled_series("E ideal", index, t.numeric_column("e_ideal")),
      sampled_series("E observed", index, t.numeric_column("e_nonideal")),
      sampled_series("V", index, t.numeric_column("v"))};
  dg::ChartSpec spec{"Evaluation validity", "commit", "value", 0.0, 1.0, {}};
  dg::write_line_chart(spec, series, svg.string());
}

void chart_sweep(const fs::path& csv, const fs::path& svg) {
  const dg::CsvTable t = dg::read_csv(csv.string());
  dg::Series v{"final V", t.numeric_column("days"),
               t.numeric_column("final_v")};
  std::string x_label = "waiting time (days)";
  const int axis_col = t.column("axis");
  if (axis_col >= 0 && !t.rows.empty())
    x_label = (t.rows[0][static_cast<std::size_t>(axis_col)] == "qa"
                   ? "SQA waiting time (days)"
                   : "BFC waiting time (days)");
  dg::ChartSpec spec{"Validity vs waiting time", x_label, "V", 0.0, 1.0, {}};
  dg::write_line_chart(spec, {v}, svg.string());
}

// Renders a chart for every known CSV present in `in`; returns the SVG names.
std::vector<std::string> render_reports(const fs::path& in, const fs::path& out) {
  std::vector<std::string> written;
  auto render = [&](const char* csv, const char* svg,
                    void (*fn)(const fs::path&, const fs::path&)) {
    if (!fs::exists(in / csv)) return;
    fn(in / csv, out / svg);
    written.emplace_back(svg);
  };
  render("checkpoints.csv", "gmean.svg", chart_checkpoints);
  render("compare.csv", "gmean.svg", chart_compare);
  render("tests.csv", "pvalue.svg", chart_tests);
  render("validity.csv", "validity.svg", chart_validity);
  render("sweep.csv", "sweep.svg", chart_sweep);
  return written;
}

// ---------------------------------------------------------------------------
// Flag surface. Every subcommand shares one flag set; only the relevant
// groups are registered on each. Flags the user actually passed override the
// config file, which overrides the defaults.

struct Flags {
  std::string config, data, synth, out = ".";
  std::string mode, strategy, learner, learner_b, mode_b, axis;
  std::string wqa, wbfc, fixed;
  std::vector<std::string> grid;
  std::uint64_t seed = 0;
  int folds = 0, checkpoints = 0, n_models = 0, resample_rate = 0, reps = 0;
  int threads = 0;
  double alpha = 0.0, lambda = 0.0, delta = 0.0, grace = 0.0, tie = 0.0;
  double noise_p = 0.0, significance = 0.0, mcnemar_alpha = 0.0;
  double sqa_error_rate = 0.0;
  bool standardize = false;
  std::vector<double> noise;
  // synth parameters
  std::uint64_t n_instances = 0;
  double defect_rate = 0.0, fix_mean_days = 0.0, fix_dispersion = 0.0;
  double inter_arrival = 0.0, feature_sigma = 0.0;
  std::int64_t start_time = 0;
  std::string fix_kind;
  std::vector<std::size_t> drift_at;

  std::map<std::string, CLI::Option*> opts;  // json path -> option

  bool passed(const std::string& path) const {
    auto it = opts.find(path);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_io(CLI::App* cmd, Flags& f, bool stream_source = true) {
  cmd->add_option("--config", f.config, "json config file (flags override it)");
  f.opts["out"] = cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads,
                  "worker threads (default: DRIFTGATE_THREADS or hardware)");
  f.opts["seed"] = cmd->add_option("--seed", f.seed, "master seed (required)");
  if (stream_source) {
    f.opts["dataset"] = cmd->add_option("--data", f.data, "commit stream csv");
    f.opts["synth"] = cmd->add_option(
        "--synth", f.synth, "'default' or a json synth spec file");
  }
}

void add_learner(CLI::App* cmd, Flags& f) {
  f.opts["learner.kind"] = cmd->add_option(
      "--learner", f.learner,
      "majority|gaussian_nb|hoeffding_tree|poisson_bagging|"
      "under_over_bagging|rus_boost|noise_filter");
  f.opts["learner.n_models"] =
      cmd->add_option("--n-models", f.n_models, "ensemble size");
  f.opts["learner.lambda"] =
      cmd->add_option("--lambda", f.lambda, "Poisson mean for online bagging");
  f.opts["learner.resample_rate"] = cmd->add_option(
      "--resample-rate", f.resample_rate, "target defect:clean training ratio");
  f.opts["learner.delta"] =
      cmd->add_option("--delta", f.delta, "Hoeffding split confidence");
  f.opts["learner.grace"] =
      cmd->add_option("--grace", f.grace, "observations between split checks");
  f.opts["learner.tie"] =
      cmd->add_option("--tie", f.tie, "Hoeffding tie threshold");
  f.opts["learner.standardize"] = cmd->add_flag(
      "--standardize", f.standardize, "online feature standardization");
  f.opts["learner.noise_p"] = cmd->add_option(
      "--noise-p", f.noise_p, "prediction flip probability (noise_filter)");
}

void add_validation(CLI::App* cmd, Flags& f) {
  f.opts["validation.strategy"] =
      cmd->add_option("--strategy", f.strategy, "cross|split|bootstrap");
  f.opts["validation.folds"] = cmd->add_option("--folds", f.folds, "fold count");
}

void add_labeling(CLI::App* cmd, Flags& f, bool with_mode = true) {
  if (with_mode)
    f.opts["labeling.mode"] =
        cmd->add_option("--mode", f.mode, "ideal|non_hitl|hitl (required)");
  f.opts["labeling.wqa"] =
      cmd->add_option("--wqa", f.wqa, "SQA waiting time (e.g. 7d)");
  f.opts["labeling.wbfc"] =
      cmd->add_option("--wbfc", f.wbfc, "BFC waiting window (e.g. 15d, inf)");
  f.opts["labeling.sqa_error_rate"] = cmd->add_option(
      "--sqa-error-rate", f.sqa_error_rate, "probability of a wrong SQA verdict");
}

void add_eval(CLI::App* cmd, Flags& f) {
  f.opts["alpha"] =
      cmd->add_option("--alpha", f.alpha, "fading factor for the metrics");
  f.opts["checkpoints"] = cmd->add_option("--checkpoints", f.checkpoints,
                                          "monitoring checkpoints per run");
}

void add_synth_params(CLI::App* cmd, Flags& f) {
  f.opts["synth.n"] = cmd->add_option("--n", f.n_instances, "stream length");
  f.opts["synth.defect_rate"] =
      cmd->add_option("--defect-rate", f.defect_rate, "positive class rate");
  f.opts["synth.fix_delay.kind"] = cmd->add_option(
      "--fix-delay-kind", f.fix_kind, "log_normal|exponential|fixed");
  f.opts["synth.fix_delay.mean_days"] = cmd->add_option(
      "--fix-delay-mean", f.fix_mean_days, "mean commit-to-fix delay, days");
  f.opts["synth.fix_delay.dispersion"] = cmd->add_option(
      "--fix-delay-dispersion", f.fix_dispersion, "log-delay sigma");
  f.opts["synth.inter_arrival_mean_s"] = cmd->add_option(
      "--inter-arrival", f.inter_arrival, "mean seconds between commits");
  f.opts["synth.start_time"] =
      cmd->add_option("--start-time", f.start_time, "epoch seconds of commit 1");
  f.opts["synth.feature_sigma"] =
      cmd->add_option("--feature-sigma", f.feature_sigma, "feature noise sigma");
  f.opts["synth.drift-at"] = cmd->add_option(
      "--drift-at", f.drift_at, "swap the class means at this index (repeatable)");
}

// Overrides drawn from flags the user actually passed, shaped like the file.
json cli_overrides(const Flags& f) {
  json o = json::object();
  auto set = [&](const std::string& path, json value) {
    json* node = &o;
    std::size_t start = 0;
    for (;;) {
      const std::size_t dot = path.find('.', start);
      if (dot == std::string::npos) {
        (*node)[path.substr(start)] = std::move(value);
        return;
      }
      node = &(*node)[path.substr(start, dot - start)];
      start = dot + 1;
    }
  };
  if (f.passed("seed")) set("seed", f.seed);
  if (f.passed("dataset")) set("dataset", f.data);
  if (f.passed("synth")) {
    if (f.synth == "default")
      set("synth", synth_to_json(dg::SynthSpec{}));
    else  // normalize through SynthSpec so the echo carries every field
      set("synth", synth_to_json(synth_from_json(load_json_file(f.synth))));
  }
  if (f.passed("learner.kind")) set("learner.kind", f.learner);
  if (f.passed("learner.n_models")) set("learner.n_models", f.n_models);
  if (f.passed("learner.lambda")) set("learner.lambda", f.lambda);
  if (f.passed("learner.resample_rate"))
    set("learner.resample_rate", f.resample_rate);
  if (f.passed("learner.delta")) set("learner.delta", f.delta);
  if (f.passed("learner.grace")) set("learner.grace", f.grace);
  if (f.passed("learner.tie")) set("learner.tie", f.tie);
  if (f.passed("learner.standardize")) set("learner.standardize", f.standardize);
  if (f.passed("learner.noise_p")) set("learner.noise_p", f.noise_p);
  if (f.passed("validation.strategy")) set("validation.strategy", f.strategy);
  if (f.passed("validation.folds")) set("validation.folds", f.folds);
  if (f.passed("labeling.mode")) set("labeling.mode", f.mode);
  if (f.passed("labeling.wqa"))
    set("labeling.wqa", duration_to_json(parse_duration_s(f.wqa)));
  if (f.passed("labeling.wbfc"))
    set("labeling.wbfc", duration_to_json(parse_duration_s(f.wbfc)));
  if (f.passed("labeling.sqa_error_rate"))
    set("labeling.sqa_error_rate", f.sqa_error_rate);
  if (f.passed("alpha")) set("alpha", f.alpha);
  if (f.passed("checkpoints")) set("checkpoints", f.checkpoints);
  if (f.passed("significance")) set("significance", f.significance);
  if (f.passed("mcnemar_alpha")) set("mcnemar_alpha", f.mcnemar_alpha);
  if (f.passed("reps")) set("reps", f.reps);
  if (f.passed("noise")) set("noise", f.noise);
  if (f.passed("learner_b.kind")) set("learner_b.kind", f.learner_b);
  if (f.passed("labeling_b.mode")) set("labeling_b.mode", f.mode_b);
  if (f.passed("axis")) set("axis", f.axis);
  if (f.passed("fixed_days")) set("fixed_days", parse_duration_days(f.fixed));
  if (f.passed("grid")) {
    json grid = json::array();
    for (const std::string& g : f.grid) grid.push_back(parse_duration_days(g));
    set("grid", grid);
  }
  // synth parameter flags imply a synthetic source
  const char* synth_keys[] = {"synth.n",
                              "synth.defect_rate",
                              "synth.fix_delay.kind",
                              "synth.fix_delay.mean_days",
                              "synth.fix_delay.dispersion",
                              "synth.inter_arrival_mean_s",
                              "synth.start_time",
                              "synth.feature_sigma"};
  for (const char* key : synth_keys)
    if (f.passed(key)) {
      if (!o.contains("synth")) set("synth", synth_to_json(dg::SynthSpec{}));
      break;
    }
  if (f.passed("synth.n")) set("synth.n", f.n_instances);
  if (f.passed("synth.defect_rate")) set("synth.defect_rate", f.defect_rate);
  if (f.passed("synth.fix_delay.kind")) set("synth.fix_delay.kind", f.fix_kind);
  if (f.passed("synth.fix_delay.mean_days"))
    set("synth.fix_delay.mean_days", f.fix_mean_days);
  if (f.passed("synth.fix_delay.dispersion"))
    set("synth.fix_delay.dispersion", f.fix_dispersion);
  if (f.passed("synth.inter_arrival_mean_s"))
    set("synth.inter_arrival_mean_s", f.inter_arrival);
  if (f.passed("synth.start_time")) set("synth.start_time", f.start_time);
  if (f.passed("synth.feature_sigma"))
    set("synth.feature_sigma", f.feature_sigma);
  return o;
}

Run assemble(const std::string& command, const Flags& f, json defaults,
             bool needs_stream = true) {
  json effective = std::move(defaults);
  if (!f.config.empty()) {
    json file = load_json_file(f.config);
    if (file.contains("command") &&
        file["command"].get<std::string>() != command)
      usage_error("config file is for '" + file["command"].get<std::string>() +
                  "', not '" + command + "'");
    file.erase("command");
    deep_merge(effective, file);
  }
  json cli = cli_overrides(f);
  // A stream source on the command line replaces the file's source entirely.
  if (cli.contains("dataset")) effective.erase("synth");
  if (cli.contains("synth")) effective.erase("dataset");
  deep_merge(effective, cli);
  effective.erase("out");

  if (!effective.contains("seed") || effective["seed"].is_null())
    usage_error("--seed is required");
  if (needs_stream) {
    const bool has_data = effective.contains("dataset");
    const bool has_synth = effective.contains("synth");
    if (has_data == has_synth)
      usage_error("exactly one of --data or --synth is required");
  }
  // Drift sugar: swap the class means at each --drift-at index.
  if (f.passed("synth.drift-at") && effective.contains("synth")) {
    json& synth = effective["synth"];
    json clean = synth.at("clean_mean");
    json defect = synth.at("defect_mean");
    for (std::size_t at : f.drift_at) {
      std::swap(clean, defect);
      synth["drift_points"].push_back(
          {{"at", at}, {"clean_mean", clean}, {"defect_mean", defect}});
    }
  }

  Run run;
  run.command = command;
  run.effective = std::move(effective);
  run.out = fs::path(f.out);
  run.threads = f.threads > 0 ? f.threads : dg::default_thread_count();
  fs::create_directories(run.out);
  return run;
}

json base_defaults(const char* learner_kind, bool with_labeling) {
  json d = {{"learner", default_learner_json(learner_kind)},
            {"validation", {{"strategy", "bootstrap"}, {"folds", 10}}},
            {"alpha", 0.99},
            {"checkpoints", 10}};
  if (with_labeling) d["labeling"] = default_labeling_json();
  return d;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

int run_simulate(const Run& run) {
  const dg::CommitStream stream = run.stream();
  dg::RunOptions options{run.threads, true, false};
  const dg::RunTrace trace =
      dg::run_prequential(stream, run.learner(), run.validation(),
                          run.labeling(), run.alpha(), run.checkpoints(),
                          options);
  dg::write_metrics_csv(trace, run.file("metrics.csv").string());
  dg::write_checkpoints_csv(trace, run.file("checkpoints.csv").string());

  json summary = {{"n", trace.n},
                  {"final_mean_gmean", trace.final_mean_gmean()},
                  {"final_fold_gmean", trace.final_fold_gmean()}};
  write_text_file(run.file("summary.json"), summary.dump(2) + "\n");

  std::vector<std::string> files{"metrics.csv", "checkpoints.csv",
                                 "summary.json"};
  for (std::string& svg : render_reports(run.out, run.out))
    files.push_back(std::move(svg));
  run.write_echo_and_manifest(std::move(files));
  std::cout << "n=" << trace.n << " final mean G-mean "
            << dg::format_double(trace.final_mean_gmean()) << "\n";
  return 0;
}

int run_validity(const Run& run) {
  dg::LabelingConfig observed = run.labeling();
  if (observed.mode == dg::LabelingMode::ideal)
    usage_error("validity needs --mode non_hitl or hitl");
  dg::LabelingConfig ideal = observed;
  ideal.mode = dg::LabelingMode::ideal;

  const dg::CommitStream stream = run.stream();
  const dg::LearnerConfig learner = run.learner();
  const dg::ValidationConfig validation = run.validation();
  dg::RunOptions options{run.threads, false, false};
  const dg::RunTrace a = dg::run_prequential(
      stream, learner, validation, ideal, run.alpha(), run.checkpoints(), options);
  const dg::RunTrace b =
      dg::run_prequential(stream, learner, validation, observed, run.alpha(),
                          run.checkpoints(), options);
  const dg::ValidityTrace v = dg::evaluation_validity(a, b);
  dg::write_validity_csv(v, run.file("validity.csv").string());
  json summary = {{"final_v", v.final_v}};
  write_text_file(run.file("summary.json"), summary.dump(2) + "\n");

  std::vector<std::string> files{"validity.csv", "summary.json"};
  for (std::string& svg : render_reports(run.out, run.out))
    files.push_back(std::move(svg));
  run.write_echo_and_manifest(std::move(files));
  std::cout << "final V " << dg::format_double(v.final_v) << "\n";
  return 0;
}

int run_sweep(const Run& run) {
  const std::string axis = run.effective.at("axis").get<std::string>();
  if (axis != "qa" && axis != "bfc") usage_error("--axis must be qa or bfc");
  dg::LabelingMode mode;
  const json& mode_j = run.effective.at("labeling").at("mode");
  if (mode_j.is_null() ||
      !dg::labeling_mode_from_string(mode_j.get<std::string>(), mode))
    usage_error("--mode is required (non_hitl or hitl)");

  std::vector<double> grid;
  for (const json& g : run.effective.at("grid")) grid.push_back(g.get<double>());
  const std::vector<double> fixed{run.effective.at("fixed_days").get<double>()};

  const dg::CommitStream stream = run.stream();
  const bool vary_qa = axis == "qa";
  const dg::SweepTable table = dg::waiting_time_sweep(
      stream, vary_qa ? grid : fixed, vary_qa ? fixed : grid,
      vary_qa ? dg::SweepAxis::bfc : dg::SweepAxis::qa, run.learner(),
      run.validation(), mode, run.alpha(), run.checkpoints(), run.threads);
  dg::write_sweep_csv(table, run.file("sweep.csv").string());

  std::vector<std::string> files{"sweep.csv"};
  for (std::string& svg : render_reports(run.out, run.out))
    files.push_back(std::move(svg));
  run.write_echo_and_manifest(std::move(files));
  for (const dg::SweepRow& row : table.rows)
    std::cout << to_string(table.varied) << " "
              << dg::format_double(row.days) << "d -> V "
              << dg::format_double(row.final_v) << "\n";
  return 0;
}

int run_errors(const Run& run) {
  std::vector<double> noise{0.0};  // level 0 is the no-change probe
  for (const json& v : run.effective.at("noise")) noise.push_back(v.get<double>());
  if (noise.size() != 3) usage_error("--noise needs exactly two levels");

  const dg::CommitStream stream = run.stream();
  const dg::ErrorRateReport report = dg::type_error_experiment(
      stream, run.learner(), run.validation(), run.alpha(),
      run.effective.at("reps").get<int>(), noise,
      run.effective.at("significance").get<double>(),
      run.effective.at("mcnemar_alpha").get<double>(), run.checkpoints(),
      run.threads);
  dg::write_errors_csv(report, run.file("errors.csv").string());
  run.write_echo_and_manifest({"errors.csv"});
  auto line = [](const dg::TestErrorRates& r) {
    std::cout << to_string(r.test) << ": type I "
              << dg::format_double(r.reject_nochange) << ", power "
              << dg::format_double(r.reject_noise_a) << "/"
              << dg::format_double(r.reject_noise_b) << "\n";
  };
  line(report.mcnemar);
  line(report.wilcoxon);
  line(report.sign);
  return 0;
}

int run_compare(const Run& run) {
  // learner_b / labeling_b default to the first side's settings.
  json jb = run.effective.at("learner");
  if (run.effective.contains("learner_b"))
    deep_merge(jb, run.effective["learner_b"]);
  json lb = run.effective.at("labeling");
  if (run.effective.contains("labeling_b"))
    deep_merge(lb, run.effective["labeling_b"]);

  const dg::CommitStream stream = run.stream();
  const dg::CompareTrace trace = dg::compare_runs(
      stream, run.learner(), run.labeling(),
      learner_from_json(jb, run.seed()), labeling_from_json(lb),
      run.validation(), run.alpha(), run.checkpoints(),
      run.effective.at("significance").get<double>(), run.threads);
  dg::write_compare_csv(trace, run.file("compare.csv").string());
  dg::write_tests_csv(trace, run.file("tests.csv").string());

  std::vector<std::string> files{"compare.csv", "tests.csv"};
  for (std::string& svg : render_reports(run.out, run.out))
    files.push_back(std::move(svg));
  run.write_echo_and_manifest(std::move(files));
  if (!trace.points.empty()) {
    const dg::ComparePoint& last = trace.points.back();
    std::cout << "final G-mean " << dg::format_double(last.mean_a) << " vs "
              << dg::format_double(last.mean_b) << ", p "
              << dg::format_double(last.wilcoxon.p_value) << "\n";
  }
  return 0;
}

int run_resample(const Run& run) {
  const dg::CommitStream stream = run.stream();
  const std::vector<dg::ResampleRow> rows = dg::resampling_study(
      stream, run.learner(), run.validation(), run.labeling(), run.alpha(),
      run.threads);
  dg::write_resample_csv(rows, run.file("resample.csv").string());
  run.write_echo_and_manifest({"resample.csv"});
  for (const dg::ResampleRow& row : rows)
    std::cout << row.config << ": R1 " << dg::format_double(row.r1) << ", FPR "
              << dg::format_double(row.fpr) << ", G-mean "
              << dg::format_double(row.gmean) << "\n";
  return 0;
}

int run_synth(const Run& run) {
  const dg::SynthSpec spec = synth_from_json(run.effective.at("synth"));
  const dg::CommitStream stream = dg::synth_stream(spec, run.seed());
  dg::write_commit_stream(stream, run.file("stream.csv").string());
  run.write_echo_and_manifest({"stream.csv"});
  const dg::StreamStats stats = dg::stream_stats(stream);
  std::cout << "n=" << stats.total << " defect fraction "
            << dg::format_double(stats.defect_fraction) << ", "
            << dg::format_double(stats.commits_per_day) << " commits/day\n";
  return 0;
}

int run_report(const std::string& in, const std::string& out) {
  fs::path out_dir = out.empty() ? fs::path(in) : fs::path(out);
  fs::create_directories(out_dir);
  const std::vector<std::string> written = render_reports(in, out_dir);
  if (written.empty())
    dg::raise(dg::ErrorKind::empty_result, "no known csv files in " + in);
  for (const std::string& name : written)
    std::cout << (out_dir / name).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prequential simulator for online defect prediction under "
               "delayed and human-in-the-loop labeling"};
  app.require_subcommand(1);

  Flags f[7];
  CLI::App* simulate =
      app.add_subcommand("simulate", "one prequential run; metric traces");
  add_io(simulate, f[0]);
  add_learner(simulate, f[0]);
  add_validation(simulate, f[0]);
  add_labeling(simulate, f[0]);
  add_eval(simulate, f[0]);
  add_synth_params(simulate, f[0]);

  CLI::App* validity = app.add_subcommand(
      "validity", "evaluation validity of a labeling mode vs ideal labels");
  add_io(validity, f[1]);
  add_learner(validity, f[1]);
  add_validation(validity, f[1]);
  add_labeling(validity, f[1]);
  add_eval(validity, f[1]);
  add_synth_params(validity, f[1]);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "final validity across a grid of waiting times");
  add_io(sweep, f[2]);
  add_learner(sweep, f[2]);
  add_validation(sweep, f[2]);
  add_labeling(sweep, f[2]);
  add_eval(sweep, f[2]);
  add_synth_params(sweep, f[2]);
  f[2].opts["axis"] = sweep->add_option("--axis", f[2].axis, "qa|bfc (varied axis)");
  f[2].opts["grid"] = sweep->add_option("--grid", f[2].grid, "waiting times, e.g. 1d,3d,7d")
                          ->delimiter(',');
  f[2].opts["fixed_days"] =
      sweep->add_option("--fixed", f[2].fixed, "value held on the other axis");

  CLI::App* errors = app.add_subcommand(
      "errors", "Monte Carlo type I/II rates of the paired tests (ideal labels)");
  add_io(errors, f[3]);
  add_learner(errors, f[3]);
  add_validation(errors, f[3]);
  add_eval(errors, f[3]);
  add_synth_params(errors, f[3]);
  f[3].opts["reps"] = errors->add_option("--reps", f[3].reps, "repetitions");
  f[3].opts["noise"] = errors->add_option("--noise", f[3].noise,
                                          "two prediction-noise levels")
                           ->delimiter(',');
  f[3].opts["significance"] =
      errors->add_option("--significance", f[3].significance, "test level");
  f[3].opts["mcnemar_alpha"] = errors->add_option(
      "--mcnemar-alpha", f[3].mcnemar_alpha,
      "fading factor for McNemar counts (1 = cumulative)");

  CLI::App* compare = app.add_subcommand(
      "compare", "paired signed-rank monitoring of two configurations");
  add_io(compare, f[4]);
  add_learner(compare, f[4]);
  add_validation(compare, f[4]);
  add_labeling(compare, f[4]);
  add_eval(compare, f[4]);
  add_synth_params(compare, f[4]);
  f[4].opts["learner_b.kind"] =
      compare->add_option("--learner-b", f[4].learner_b, "second learner kind");
  f[4].opts["labeling_b.mode"] =
      compare->add_option("--mode-b", f[4].mode_b, "second labeling mode");
  f[4].opts["significance"] =
      compare->add_option("--significance", f[4].significance, "test level");

  CLI::App* resample = app.add_subcommand(
      "resample", "bare tree vs the four resampling ensembles");
  add_io(resample, f[5]);
  add_learner(resample, f[5]);
  add_validation(resample, f[5]);
  add_labeling(resample, f[5]);
  add_eval(resample, f[5]);
  add_synth_params(resample, f[5]);

  CLI::App* synth =
      app.add_subcommand("synth", "generate a synthetic commit stream");
  add_io(synth, f[6], false);
  add_synth_params(synth, f[6]);

  CLI::App* report = app.add_subcommand(
      "report", "render svg charts from the csv traces in a directory");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "directory holding the csv traces")
      ->required();
  report->add_option("--out", report_out, "output directory (default: --in)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed())
      return run_simulate(assemble("simulate", f[0],
                                   base_defaults("hoeffding_tree", true)));
    if (validity->parsed())
      return run_validity(assemble("validity", f[1],
                                   base_defaults("hoeffding_tree", true)));
    if (sweep->parsed()) {
      json d = base_defaults("hoeffding_tree", true);
      d["axis"] = "qa";
      d["grid"] = {1.0, 3.0, 7.0, 15.0, 30.0};
      d["fixed_days"] = 15.0;
      return run_sweep(assemble("sweep", f[2], std::move(d)));
    }
    if (errors->parsed()) {
      json d = base_defaults("poisson_bagging", false);
      d["reps"] = 50;
      d["noise"] = {0.05, 0.1};
      d["significance"] = 0.05;
      d["mcnemar_alpha"] = 1.0;
      return run_errors(assemble("errors", f[3], std::move(d)));
    }
    if (compare->parsed()) {
      json d = base_defaults("hoeffding_tree", true);
      d["significance"] = 0.05;
      return run_compare(assemble("compare", f[4], std::move(d)));
    }
    if (resample->parsed())
      return run_resample(assemble("resample", f[5],
                                   base_defaults("hoeffding_tree", true)));
    if (synth->parsed()) {
      json d;
      d["synth"] = synth_to_json(dg::SynthSpec{});
      return run_synth(assemble("synth", f[6], std::move(d), false));
    }
    if (report->parsed()) return run_report(report_in, report_out);
    usage_error("no subcommand");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const dg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == dg::ErrorKind::bad_config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
