#include "sensorimotor/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>
#include <utility>

#include "sensorimotor/errors.hpp"

namespace sensorimotor {

void ExperimentConfig::sync_dimensions() {
  elm.output_dim = static_cast<Eigen::Index>(window_w) * window_h;
  elm.input_dim = elm.output_dim + 2;
}

void ExperimentConfig::validate() const {
  if (steps < 1) throw ConfigError("steps must be positive");
  if (window_w < 1 || window_h < 1) throw ConfigError("camera window must be positive");
  if (elm.output_dim != static_cast<Eigen::Index>(window_w) * window_h ||
      elm.input_dim != elm.output_dim + 2)
    throw ConfigError("elm dimensions must be p = window area and n = p + 2");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma))
    throw ConfigError("noise sigma must be a non-negative number");
  elm.validate();
  controller.validate();
}

double Metrics::stay_fraction() const {
  const auto total = std::accumulate(action_histogram.begin(), action_histogram.end(),
                                     std::size_t{0});
  if (total == 0) return 0.0;
  return static_cast<double>(action_histogram[index_of(MotorCommand::Stay)]) /
         static_cast<double>(total);
}

std::uint64_t derive_seed(std::uint64_t master_seed, SeedStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

WorldImage load_world(const ExperimentConfig& config) {
  if (config.image == kSyntheticImage) return synthetic_image(512, 512, config.synthetic_seed);
  return load_image_file(config.image);
}

RunResult run_experiment(const ExperimentConfig& config) {
  const WorldImage world = load_world(config);
  return run_experiment(config, world);
}

RunResult run_experiment(const ExperimentConfig& config, const WorldImage& world) {
  config.validate();

  ElmConfig elm_cfg = config.elm;
  elm_cfg.seed = derive_seed(config.master_seed, SeedStream::Elm);
  ControllerConfig ctrl_cfg = config.controller;
  ctrl_cfg.seed = derive_seed(config.master_seed, SeedStream::Controller);
  std::mt19937_64 noise_rng(derive_seed(config.master_seed, SeedStream::Noise));
  std::mt19937_64 ctrl_rng(ctrl_cfg.seed);

  CameraState cam = centered_camera(world, config.window_w, config.window_h);
  if (config.start_x) cam.x = *config.start_x;
  if (config.start_y) cam.y = *config.start_y;
  if (!camera_fits(world, cam)) throw ConfigError("start position puts the window outside the image");

  RunResult result;
  result.config = config;
  result.trace.reserve(config.steps);
  ElmState<double> elm = init_elm<double>(elm_cfg);
  ErrorHistory history(ctrl_cfg.history_capacity());

  SensorFrame frame = observe(world, cam, config.noise, noise_rng);
  DenseVector<double> x(elm.input_dim());
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto t = static_cast<std::int64_t>(step);
    const MotorCommand cmd =
        config.forced_command ? *config.forced_command : choose_action(history, ctrl_cfg, ctrl_rng);
    x << frame, motor_vector(cmd);
    const DenseVector<double> forecast = predict_input(elm, x);

    const CameraState next_cam = apply_motor(world, cam, cmd);
    SensorFrame next = observe(world, next_cam, config.noise, noise_rng);
    const double error = prediction_error(forecast, next);
    try {
      update_online(elm, x, next);
    } catch (const NumericError& e) {
      result.valid = false;
      result.failure = "step " + std::to_string(step) + ": " + e.what();
      break;
    }

    history.push({t, cmd, error});
    result.trace.push_back({t, cam.x, cam.y, cmd, error});
    cam = next_cam;
    frame = std::move(next);
  }

  result.final_camera = cam;
  if (!result.trace.empty()) result.metrics = compute_metrics(result.trace);
  result.model = std::move(elm);
  return result;
}

Metrics compute_metrics(std::span<const StepRecord> trace, std::size_t final_window,
                        std::size_t curve_window) {
  if (trace.empty()) throw UsageError("compute_metrics: empty trace");
  if (final_window < 1 || curve_window < 1) throw UsageError("compute_metrics: zero window");

  Metrics m;
  const std::size_t k = std::min(final_window, trace.size());
  double tail = 0.0;
  for (std::size_t i = trace.size() - k; i < trace.size(); ++i) tail += trace[i].error;
  m.final_error = tail / static_cast<double>(k);

  std::set<std::pair<int, int>> visited;
  int min_x = trace.front().cam_x, max_x = min_x;
  int min_y = trace.front().cam_y, max_y = min_y;
  m.mean_error_curve.reserve(trace.size());
  double running = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    visited.emplace(r.cam_x, r.cam_y);
    min_x = std::min(min_x, r.cam_x);
    max_x = std::max(max_x, r.cam_x);
    min_y = std::min(min_y, r.cam_y);
    max_y = std::max(max_y, r.cam_y);
    ++m.action_histogram[index_of(r.cmd)];

    running += r.error;
    if (i >= curve_window) running -= trace[i - curve_window].error;
    const auto n = std::min(i + 1, curve_window);
    m.mean_error_curve.push_back(running / static_cast<double>(n));
  }
  m.unique_positions = visited.size();
  m.bbox_area = static_cast<std::int64_t>(max_x - min_x + 1) * (max_y - min_y + 1);
  return m;
}

double median(std::vector<double> values) {
  if (values.empty()) throw UsageError("median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

const ComparisonCell& Comparison::cell(ControllerKind kind, std::uint64_t seed) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.seed == seed) return c;
  throw UsageError("comparison: no such cell");
}

Comparison run_comparison(const ExperimentConfig& base, std::span<const ControllerKind> kinds,
                          std::span<const std::uint64_t> seeds, unsigned threads) {
  if (kinds.empty() || seeds.empty()) throw UsageError("comparison needs at least one kind and seed");
  base.validate();

  Comparison out;
  out.kinds.assign(kinds.begin(), kinds.end());
  out.seeds.assign(seeds.begin(), seeds.end());
  for (auto kind : kinds)
    for (auto seed : seeds) out.cells.push_back({kind, seed, std::nullopt, {}});

  const WorldImage world = load_world(base);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.cells.size(); i = next++) {
      auto& c = out.cells[i];
      ExperimentConfig cfg = base;
      cfg.controller.kind = c.kind;
      cfg.master_seed = c.seed;
      try {
        c.result = run_experiment(cfg, world);
        if (!c.result->valid) c.error = c.result->failure;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(out.cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  auto ok = [](const ComparisonCell& c) { return c.result && c.result->valid; };
  for (auto kind : out.kinds) {
    std::vector<double> err, uniq, bbox, stay;
    for (const auto& c : out.cells) {
      if (c.kind != kind || !ok(c)) continue;
      const auto& m = c.result->metrics;
      err.push_back(m.final_error);
      uniq.push_back(static_cast<double>(m.unique_positions));
      bbox.push_back(static_cast<double>(m.bbox_area));
      stay.push_back(m.stay_fraction());
    }
    KindSummary s{kind, err.size()};
    if (!err.empty()) {
      s.median_final_error = median(err);
      s.median_unique_positions = median(uniq);
      s.median_bbox_area = median(bbox);
      s.median_stay_fraction = median(stay);
    } else {
      s.median_final_error = s.median_unique_positions = s.median_bbox_area =
          s.median_stay_fraction = std::nan("");
    }
    out.summaries.push_back(s);
  }

  for (auto seed : out.seeds) {
    SeedRanking r{seed, out.kinds};
    bool complete = std::all_of(r.order.begin(), r.order.end(),
                                [&](ControllerKind k) { return ok(out.cell(k, seed)); });
    if (!complete) continue;
    std::stable_sort(r.order.begin(), r.order.end(), [&](ControllerKind a, ControllerKind b) {
      return out.cell(a, seed).result->metrics.final_error <
             out.cell(b, seed).result->metrics.final_error;
    });
    out.rankings.push_back(std::move(r));
  }
  return out;
}

}  // namespace sensorimotor
