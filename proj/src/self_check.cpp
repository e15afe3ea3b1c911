#include "sensorimotor/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "sensorimotor/controllers.hpp"
#include "sensorimotor/elm.hpp"
#include "sensorimotor/harness.hpp"
#include "sensorimotor/pseudo_inverse.hpp"
#include "sensorimotor/world.hpp"

namespace sensorimotor {
namespace {

using Mat = DenseMatrix<double>;
using Vec = DenseVector<double>;

double rel_inf(const Mat& diff, const Mat& ref) {
  return diff.cwiseAbs().rowwise().sum().maxCoeff() /
         std::max(1.0, ref.cwiseAbs().rowwise().sum().maxCoeff());
}

Mat random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat a(rows, rank), b(rank, cols);
  for (auto i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  for (auto i = 0; i < b.size(); ++i) b.data()[i] = n(rng);
  return a * b;
}

std::string check_penrose() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Eigen::Index> dim(1, 20);
  for (int trial = 0; trial < 40; ++trial) {
    const auto rows = dim(rng), cols = std::uniform_int_distribution<Eigen::Index>(1, 30)(rng);
    const auto full = std::min(rows, cols);
    const auto rank = trial % 2 ? std::max<Eigen::Index>(1, full / 2) : full;
    const Mat a = random_matrix(rng, rows, cols, rank);
    const Mat g = pseudo_inverse(a);
    const double worst = std::max({rel_inf(a * g * a - a, a), rel_inf(g * a * g - g, g),
                                   rel_inf((a * g).transpose() - a * g, a * g),
                                   rel_inf((g * a).transpose() - g * a, g * a)});
    if (worst > 1e-8) return "trial " + std::to_string(trial) + " residual " + std::to_string(worst);
  }
  return {};
}

ElmConfig small_elm(Eigen::Index n, Eigen::Index p, Eigen::Index hidden, std::uint64_t seed) {
  ElmConfig c;
  c.input_dim = n;
  c.output_dim = p;
  c.hidden_count = hidden;
  c.seed = seed;
  return c;
}

std::vector<TrainingPair<double>> random_pairs(std::mt19937_64& rng, std::size_t count,
                                               Eigen::Index n, Eigen::Index p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TrainingPair<double>> pairs(count);
  for (auto& pr : pairs) {
    pr.x = Vec::NullaryExpr(n, [&] { return u(rng); });
    pr.y = Vec::NullaryExpr(p, [&] { return u(rng); });
  }
  return pairs;
}

std::string check_batch_optimality() {
  std::mt19937_64 rng(12);
  const auto state = init_elm(small_elm(8, 6, 5, 3));
  const auto pairs = random_pairs(rng, 40, 8, 6);
  const auto fitted = fit_batch(state, std::span(pairs));
  Mat h = hidden_matrix(state, std::span(pairs));
  Mat y(6, 40);
  for (std::size_t j = 0; j < pairs.size(); ++j) y.col(static_cast<Eigen::Index>(j)) = pairs[j].y;
  const double best = (fitted.readout() * h - y).norm();
  std::normal_distribution<double> n(0.0, 1e-3);
  for (int k = 0; k < 20; ++k) {
    Mat delta = Mat::NullaryExpr(6, 5, [&] { return n(rng); });
    if (((fitted.readout() + delta) * h - y).norm() < best - 1e-10) return "perturbation improved fit";
  }
  return {};
}

std::string check_online_matches_batch() {
  std::mt19937_64 rng(13);
  ElmConfig cfg = small_elm(12, 10, 6, 5);
  cfg.weight_init_low = -0.5;
  cfg.weight_init_high = 0.5;
  auto state = init_elm(cfg);
  const auto w0 = state.input_weights();
  const auto b0 = state.bias();
  const auto pairs = random_pairs(rng, 200, 12, 10);
  for (const auto& pr : pairs) update_online(state, pr);
  const auto batch = fit_batch(state, std::span(pairs));
  const double gap = (state.readout() - batch.readout()).norm() / batch.readout().norm();
  if (gap > 1e-4) return "relative gap " + std::to_string(gap);
  if (state.input_weights() != w0 || state.bias() != b0) return "hidden layer changed";
  return {};
}

std::string check_prediction_error() {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Vec a = Vec::NullaryExpr(16, [&] { return u(rng); });
    Vec b = a;
    if (prediction_error(a, b) != 0.0) return "non-zero error for equal vectors";
    b(k % 16) += 1e-3;
    if (!(prediction_error(a, b) > 0.0)) return "zero error for different vectors";
  }
  return {};
}

std::string check_motor_bounds() {
  const WorldImage world = synthetic_image(64, 48, 2);
  std::mt19937_64 rng(15);
  CameraState cam = centered_camera(world, 8, 8);
  for (int k = 0; k < 100000; ++k) {
    const auto next = apply_motor(world, cam, choose_random(rng));
    if (!camera_fits(world, next)) return "camera left the image at step " + std::to_string(k);
    const int dx = std::abs(next.x - cam.x), dy = std::abs(next.y - cam.y);
    if (dx + dy > 1) return "camera jumped more than one pixel";
    cam = next;
  }
  return {};
}

std::string check_opposites_cancel() {
  const WorldImage world = synthetic_image(40, 40, 3);
  const std::pair<MotorCommand, MotorCommand> opposite[] = {
      {MotorCommand::Left, MotorCommand::Right}, {MotorCommand::Right, MotorCommand::Left},
      {MotorCommand::Up, MotorCommand::Down}, {MotorCommand::Down, MotorCommand::Up}};
  for (int x = 0; x <= 32; ++x)
    for (int y = 0; y <= 32; ++y)
      for (auto [a, b] : opposite) {
        const CameraState cam{x, y, 8, 8};
        const auto mid = apply_motor(world, cam, a);
        const auto v = command_to_velocity(a);
        if (mid.x != cam.x + v.vx || mid.y != cam.y + v.vy) continue;  // clamped
        if (apply_motor(world, mid, b) != cam) return "opposite commands did not cancel";
      }
  return {};
}

std::string check_observe_slicing() {
  const WorldImage world = synthetic_image(50, 40, 4);
  std::mt19937_64 rng(16);
  const CameraState cam{7, 5, 9, 6};
  const auto frame = observe(world, cam, NoiseModel{0.0}, rng);
  if (frame.size() != 54) return "frame length";
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 9; ++c)
      if (frame(r * 9 + c) != world.at(7 + c, 5 + r)) return "pixel mismatch";
  return {};
}

std::string check_pgm_roundtrip() {
  const WorldImage world = synthetic_image(23, 17, 5);
  const auto once = load_image(encode_pgm(world.pixels(), PgmEncoding::Ascii));
  const auto twice = load_image(encode_pgm(once.pixels(), PgmEncoding::Ascii));
  if ((once.pixels() - twice.pixels()).abs().maxCoeff() != 0.0) return "P2 round trip changed pixels";
  return {};
}

ErrorHistory random_history(std::mt19937_64& rng, std::size_t length) {
  ErrorHistory h(length + 1);
  std::uniform_real_distribution<double> e(0.0, 1.0);
  for (std::size_t i = 0; i < length; ++i)
    h.push({static_cast<std::int64_t>(i), choose_random(rng), e(rng)});
  return h;
}

std::string check_controller_scan() {
  std::mt19937_64 rng(17);
  ControllerConfig cfg;
  cfg.epsilon = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto history = random_history(rng, 1 + static_cast<std::size_t>(k % 40));
    const std::size_t first = history.size() > cfg.window ? history.size() - cfg.window : 0;
    std::size_t lo = first, hi = first;
    for (std::size_t i = first; i < history.size(); ++i) {
      if (history[i].error <= history[lo].error) lo = i;
      if (history[i].error >= history[hi].error) hi = i;
    }
    std::mt19937_64 r1(1), r2(1);
    if (choose_minpe(history, cfg, r1) != history[lo].cmd) return "minpe disagrees with scan";
    if (choose_maxpe(history, cfg, r2) != history[hi].cmd) return "maxpe disagrees with scan";
  }
  return {};
}

std::string check_controllers_total() {
  std::mt19937_64 rng(18);
  ControllerConfig cfg;
  const ErrorHistory empty;
  for (auto kind : kAllControllers) {
    cfg.kind = kind;
    for (double eps : {0.0, 0.2, 1.0}) {
      cfg.epsilon = eps;
      const auto cmd = choose_action(empty, cfg, rng);
      if (index_of(cmd) >= kCommandCount) return "invalid command on empty history";
    }
  }
  return {};
}

std::string check_closed_loop() {
  ExperimentConfig cfg;
  cfg.steps = 300;
  cfg.window_w = cfg.window_h = 16;
  cfg.sync_dimensions();
  cfg.controller.kind = ControllerKind::MaxLP;
  const WorldImage world = synthetic_image(128, 128, 1);
  const auto a = run_experiment(cfg, world);
  const auto b = run_experiment(cfg, world);
  if (!a.valid) return "run failed: " + a.failure;
  if (a.trace != b.trace) return "same seed produced different traces";
  for (std::size_t i = 1; i < a.trace.size(); ++i) {
    const int d = std::abs(a.trace[i].cam_x - a.trace[i - 1].cam_x) +
                  std::abs(a.trace[i].cam_y - a.trace[i - 1].cam_y);
    if (d > 1) return "non-adjacent consecutive positions";
  }
  for (const auto& r : a.trace)
    if (!std::isfinite(r.error)) return "non-finite error";
  return {};
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
  const std::pair<const char*, std::function<std::string()>> checks[] = {
      {"pseudo-inverse Penrose conditions", check_penrose},
      {"batch readout is least-squares optimal", check_batch_optimality},
      {"online readout matches batch; hidden layer fixed", check_online_matches_batch},
      {"prediction error is zero iff vectors equal", check_prediction_error},
      {"camera stays inside the image", check_motor_bounds},
      {"opposite commands cancel away from edges", check_opposites_cancel},
      {"noise-free observation equals window slice", check_observe_slicing},
      {"PGM P2 round trip", check_pgm_roundtrip},
      {"MinPE/MaxPE agree with brute-force scan", check_controller_scan},
      {"every policy returns a valid command", check_controllers_total},
      {"closed loop is deterministic and continuous", check_closed_loop},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : checks) {
    CheckResult r{name, false, {}};
    try {
      r.detail = fn();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace sensorimotor
