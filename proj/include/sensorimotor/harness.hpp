#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensorimotor/controllers.hpp"
#include "sensorimotor/elm.hpp"
#include "sensorimotor/world.hpp"

namespace sensorimotor {

inline constexpr std::string_view kSyntheticImage = "synthetic";

struct ExperimentConfig {
  std::size_t steps = 5000;
  ElmConfig elm{};
  ControllerConfig controller{};
  NoiseModel noise{};
  std::string image = std::string(kSyntheticImage);  // PGM path or "synthetic"
  std::uint64_t synthetic_seed = 1;
  int window_w = 32;
  int window_h = 32;
  std::optional<int> start_x;  // defaults to the image centre
  std::optional<int> start_y;
  std::uint64_t master_seed = 1;
  // Test hook: bypass the controller and issue this command every step.
  std::optional<MotorCommand> forced_command;

  /// Sets the ELM sensor/input dimensions from the camera window.
  void sync_dimensions();
  void validate() const;
};

struct StepRecord {
  std::int64_t t = 0;
  int cam_x = 0;  // top-left of the window where s_t was observed
  int cam_y = 0;
  MotorCommand cmd = MotorCommand::Stay;
  double error = 0.0;  // e_{t+1}, measured after acting
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Metrics {
  double final_error = 0.0;
  std::size_t unique_positions = 0;
  std::int64_t bbox_area = 0;
  std::array<std::size_t, kCommandCount> action_histogram{};
  std::vector<double> mean_error_curve;

  double stay_fraction() const;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<StepRecord> trace;
  Metrics metrics;
  bool valid = true;
  std::string failure;  // set when the run aborted
  CameraState final_camera;
  std::optional<ElmState<double>> model;
};

/// Independent PRNG stream for one concern (ELM init, noise, controller).
enum class SeedStream : std::uint64_t { Elm = 1, Noise = 2, Controller = 3 };
std::uint64_t derive_seed(std::uint64_t master_seed, SeedStream stream);

WorldImage load_world(const ExperimentConfig& config);

/// One closed-loop run. Per step: act on the current frame, forecast the next
/// frame, move, observe, score, then train on the observed transition.
RunResult run_experiment(const ExperimentConfig& config);
RunResult run_experiment(const ExperimentConfig& config, const WorldImage& world);

/// final_error averages the last `final_window` errors; the curve is a
/// trailing mean over `curve_window` steps.
Metrics compute_metrics(std::span<const StepRecord> trace, std::size_t final_window = 100,
                        std::size_t curve_window = 100);

struct KindSummary {
  ControllerKind kind = ControllerKind::RM;
  std::size_t runs = 0;  // valid runs contributing to the medians
  double median_final_error = 0.0;
  double median_unique_positions = 0.0;
  double median_bbox_area = 0.0;
  double median_stay_fraction = 0.0;
};

struct ComparisonCell {
  ControllerKind kind = ControllerKind::RM;
  std::uint64_t seed = 0;
  std::optional<RunResult> result;
  std::string error;  // non-empty if the cell failed
};

struct SeedRanking {
  std::uint64_t seed = 0;
  std::vector<ControllerKind> order;  // ascending final_error
};

struct Comparison {
  std::vector<ControllerKind> kinds;
  std::vector<std::uint64_t> seeds;
  std::vector<ComparisonCell> cells;  // ordered by (kind, seed)
  std::vector<KindSummary> summaries;
  std::vector<SeedRanking> rankings;  // seeds where every kind produced a valid run

  const ComparisonCell& cell(ControllerKind kind, std::uint64_t seed) const;
};

/// Runs every (kind, seed) cell, in parallel when `threads` > 1 (0 = hardware
/// concurrency). A failing cell is recorded without stopping the others.
Comparison run_comparison(const ExperimentConfig& base, std::span<const ControllerKind> kinds,
                          std::span<const std::uint64_t> seeds, unsigned threads = 0);

double median(std::vector<double> values);

}  // namespace sensorimotor
