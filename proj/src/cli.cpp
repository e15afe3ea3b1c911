#include "sensorimotor/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sensorimotor/elm_io.hpp"
#include "sensorimotor/errors.hpp"
#include "sensorimotor/report.hpp"
#include "sensorimotor/self_check.hpp"

namespace sensorimotor::cli {
namespace {

struct HelpRequested {
  std::string text;
};

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError("invalid value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

ControllerKind parse_kind(std::string_view text) {
  auto kind = parse_controller(text);
  if (!kind)
    throw UsageError("unknown controller '" + std::string(text) +
                     "' (expected rm, minpe, maxpe or maxlp)");
  return *kind;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

constexpr std::array<std::string_view, 20> kKeys{
    "steps",    "seed",       "controller", "epsilon",     "window",    "em_window", "hidden",
    "sigma",    "image",      "synthetic_seed", "camera_w", "camera_h", "start_x",   "start_y",
    "delta",    "weight_low", "weight_high", "bias_low",   "bias_high", "activation"};

struct RawOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> image;
  std::optional<double> sigma;
  std::optional<double> epsilon;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> window;
  std::optional<std::size_t> em_window;
  std::optional<std::string> controller;
  std::string seeds;
  std::string controllers;
  unsigned threads = 0;
  bool dump_model = false;
};

void add_experiment_options(CLI::App& sub, RawOptions& raw) {
  sub.add_option("--config", raw.config, "JSON file of key/value settings");
  sub.add_option("--set", raw.sets, "Override a setting, key=value (repeatable)");
  sub.add_option("--out", raw.out, "Output directory");
  sub.add_option("--steps", raw.steps, "Timesteps per run (default 5000)");
  sub.add_option("--image", raw.image, "PGM image path or 'synthetic'");
  sub.add_option("--sigma", raw.sigma, "Sensor noise standard deviation (default 0.01)");
  sub.add_option("--epsilon", raw.epsilon, "Random-action probability (default 0.2)");
  sub.add_option("--hidden", raw.hidden, "Hidden neurons (default 30)");
  sub.add_option("--window", raw.window, "Command-reuse lookback (default 20)");
  sub.add_option("--em-window", raw.em_window, "Learning-progress averaging width (default 10)");
}

}  // namespace

std::span<const std::string_view> setting_keys() { return kKeys; }

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  if (key == "steps") c.steps = parse_value<std::size_t>(key, value);
  else if (key == "seed") c.master_seed = parse_value<std::uint64_t>(key, value);
  else if (key == "controller") c.controller.kind = parse_kind(value);
  else if (key == "epsilon") c.controller.epsilon = parse_value<double>(key, value);
  else if (key == "window") c.controller.window = parse_value<std::size_t>(key, value);
  else if (key == "em_window") c.controller.em_window = parse_value<std::size_t>(key, value);
  else if (key == "hidden") c.elm.hidden_count = parse_value<Eigen::Index>(key, value);
  else if (key == "sigma") c.noise.sigma = parse_value<double>(key, value);
  else if (key == "image") c.image = std::string(value);
  else if (key == "synthetic_seed") c.synthetic_seed = parse_value<std::uint64_t>(key, value);
  else if (key == "camera_w") c.window_w = parse_value<int>(key, value);
  else if (key == "camera_h") c.window_h = parse_value<int>(key, value);
  else if (key == "start_x") c.start_x = parse_value<int>(key, value);
  else if (key == "start_y") c.start_y = parse_value<int>(key, value);
  else if (key == "delta") c.elm.online_init_scale = parse_value<double>(key, value);
  else if (key == "weight_low") c.elm.weight_init_low = parse_value<double>(key, value);
  else if (key == "weight_high") c.elm.weight_init_high = parse_value<double>(key, value);
  else if (key == "bias_low") c.elm.bias_init_low = parse_value<double>(key, value);
  else if (key == "bias_high") c.elm.bias_init_high = parse_value<double>(key, value);
  else if (key == "activation") {
    if (value == "logistic") c.elm.activation = Activation::Logistic;
    else if (value == "tanh") c.elm.activation = Activation::Tanh;
    else throw UsageError("activation must be 'logistic' or 'tanh'");
  } else {
    throw UsageError("unknown setting '" + std::string(key) + "'");
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config " + path.string() + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_string()) apply_setting(config, key, value.get<std::string>());
    else if (value.is_number()) apply_setting(config, key, value.dump());
    else throw UsageError("config key '" + key + "' must be a number or string");
  }
}

CliConfig parse_args(std::span<const std::string> args) {
  CLI::App app{"Online sensorimotor prediction with an extreme learning machine", "sensorimotor"};
  app.require_subcommand(1, 1);
  RawOptions raw;

  auto* run = app.add_subcommand("run", "Run one closed-loop experiment");
  add_experiment_options(*run, raw);
  run->add_option("--seed", raw.seed, "Master seed");
  run->add_option("--controller", raw.controller, "rm | minpe | maxpe | maxlp");
  run->add_flag("--dump-model", raw.dump_model, "Also write the trained network to model.elm");

  auto* compare = app.add_subcommand("compare", "Run every controller over several seeds");
  add_experiment_options(*compare, raw);
  compare->add_option("--seeds", raw.seeds, "Comma-separated seeds (default 1..10)");
  compare->add_option("--controllers", raw.controllers, "Comma-separated kinds (default all)");
  compare->add_option("--threads", raw.threads, "Worker threads (0 = all cores)");

  app.add_subcommand("validate", "Run the built-in invariant checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto* target = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    throw HelpRequested{target->help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CliConfig cfg;
  if (run->parsed()) cfg.subcommand = Subcommand::Run;
  else if (compare->parsed()) cfg.subcommand = Subcommand::Compare;
  else cfg.subcommand = Subcommand::Validate;

  if (!raw.out.empty()) cfg.out_dir = raw.out;
  else if (const char* env = std::getenv(kOutDirEnv); env && *env) cfg.out_dir = env;

  auto& e = cfg.experiment;
  if (!raw.config.empty()) {
    cfg.config_path = raw.config;
    apply_config_file(e, *cfg.config_path);
  }
  for (const auto& kv : raw.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    apply_setting(e, std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
    cfg.overrides.push_back(kv);
  }
  if (raw.steps) e.steps = *raw.steps;
  if (raw.seed) e.master_seed = *raw.seed;
  if (raw.image) e.image = *raw.image;
  if (raw.sigma) e.noise.sigma = *raw.sigma;
  if (raw.epsilon) e.controller.epsilon = *raw.epsilon;
  if (raw.hidden) e.elm.hidden_count = static_cast<Eigen::Index>(*raw.hidden);
  if (raw.window) e.controller.window = *raw.window;
  if (raw.em_window) e.controller.em_window = *raw.em_window;
  if (raw.controller) e.controller.kind = parse_kind(*raw.controller);
  cfg.dump_model = raw.dump_model;
  cfg.threads = raw.threads;

  if (cfg.subcommand == Subcommand::Compare) {
    if (raw.seeds.empty()) {
      for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
    } else {
      for (auto item : split_list(raw.seeds)) cfg.seeds.push_back(parse_value<std::uint64_t>("--seeds", item));
    }
    if (raw.controllers.empty()) {
      cfg.kinds.assign(kAllControllers.begin(), kAllControllers.end());
    } else {
      for (auto item : split_list(raw.controllers)) cfg.kinds.push_back(parse_kind(item));
    }
  }

  e.sync_dimensions();
  try {
    e.validate();
  } catch (const ConfigError& err) {
    throw UsageError(err.what());
  }
  return cfg;
}

namespace {

void print_metrics(std::ostream& out, const Metrics& m) {
  char line[200];
  std::snprintf(line, sizeof line,
                "final_error=%.6g unique_positions=%zu bbox_area=%lld stay_fraction=%.3f\n",
                m.final_error, m.unique_positions, static_cast<long long>(m.bbox_area),
                m.stay_fraction());
  out << line;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());
}

int do_run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  ensure_dir(cfg.out_dir);
  const auto& e = cfg.experiment;
  const WorldImage world = load_world(e);
  const RunResult result = run_experiment(e, world);

  write_trace_csv(result, cfg.out_dir / "trace.csv");
  if (!result.trace.empty())
    write_text_file(cfg.out_dir / "metrics.csv", format_metrics_csv(result.metrics));
  const auto& model = *result.model;
  const DenseVector<double> predicted =
      predict(model, window_pixels(world, result.final_camera), motor_vector(MotorCommand::Stay));
  render_frames(world, result.final_camera, predicted, cfg.out_dir / "frame");
  if (cfg.dump_model) write_model(cfg.out_dir / "model.elm", model);

  out << controller_name(e.controller.kind) << " seed " << e.master_seed << ": ";
  if (!result.trace.empty()) print_metrics(out, result.metrics);
  else out << "no steps completed\n";
  if (!result.valid) {
    err << "run aborted: " << result.failure << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int do_compare(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  ensure_dir(cfg.out_dir);
  ensure_dir(cfg.out_dir / "traces");
  const Comparison cmp = run_comparison(cfg.experiment, cfg.kinds, cfg.seeds, cfg.threads);
  write_summary(cmp, cfg.out_dir / "summary.csv", cfg.out_dir / "ranking.csv");

  bool failed = false;
  for (const auto& c : cmp.cells) {
    if (c.result && !c.result->trace.empty()) {
      const auto name = std::string(controller_name(c.kind)) + "_seed" + std::to_string(c.seed) + ".csv";
      write_trace_csv(*c.result, cfg.out_dir / "traces" / name);
    }
    if (!c.error.empty()) {
      failed = true;
      err << controller_name(c.kind) << " seed " << c.seed << " failed: " << c.error << "\n";
    }
  }
  out << format_summary_csv(cmp);
  return failed ? kExitRuntime : kExitOk;
}

int do_validate(std::ostream& out) {
  bool all = true;
  for (const auto& r : run_self_checks()) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) out << ": " << r.detail;
    out << "\n";
    all = all && r.passed;
  }
  return all ? kExitOk : kExitRuntime;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    switch (cfg.subcommand) {
      case Subcommand::Run: return do_run(cfg, out, err);
      case Subcommand::Compare: return do_compare(cfg, out, err);
      case Subcommand::Validate: return do_validate(out);
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace sensorimotor::cli
