#include "sensorimotor/controllers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "sensorimotor/errors.hpp"

namespace sensorimotor {

ErrorHistory::ErrorHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("error history capacity must be positive");
}

void ErrorHistory::push(const ErrorRecord& record) {
  if (!records_.empty() && record.t <= records_.back().t)
    throw UsageError("error history: timesteps must increase");
  if (!(record.error >= 0.0) || !std::isfinite(record.error))
    throw UsageError("error history: error must be finite and non-negative");
  records_.push_back(record);
  if (records_.size() > capacity_) records_.pop_front();
}

std::string_view controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::RM: return "RM";
    case ControllerKind::MinPE: return "MinPE";
    case ControllerKind::MaxPE: return "MaxPE";
    case ControllerKind::MaxLP: return "MaxLP";
  }
  return "?";
}

std::optional<ControllerKind> parse_controller(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto kind : kAllControllers) {
    std::string name(controller_name(kind));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == lower) return kind;
  }
  return std::nullopt;
}

void ControllerConfig::validate() const {
  if (window < 1) throw ConfigError("controller window must be at least 1");
  if (em_window < 1) throw ConfigError("controller em_window must be at least 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
}

MotorCommand choose_random(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kCommandCount - 1);
  return kAllCommands[pick(rng)];
}

namespace {

bool explore(const ControllerConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < cfg.epsilon;
}

std::size_t window_start(const ErrorHistory& history, std::size_t window) {
  return history.size() > window ? history.size() - window : 0;
}

// Scan the window; `better(candidate, best)` true means the candidate replaces
// the current best. Non-strict comparisons make the latest record win ties.
template <typename Better>
MotorCommand reuse_extreme(const ErrorHistory& history, const ControllerConfig& cfg,
                           std::mt19937_64& rng, Better better) {
  if (explore(cfg, rng) || history.empty()) return choose_random(rng);
  const std::size_t first = window_start(history, cfg.window);
  std::size_t best = first;
  for (std::size_t i = first + 1; i < history.size(); ++i)
    if (better(history[i].error, history[best].error)) best = i;
  return history[best].cmd;
}

std::optional<double> try_sliding_mean(const ErrorHistory& history, std::int64_t tau,
                                       std::size_t em_window) {
  const auto lo = tau - static_cast<std::int64_t>(em_window);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : history.records()) {
    if (r.t > lo && r.t <= tau) {
      sum += r.error;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace

MotorCommand choose_minpe(const ErrorHistory& history, const ControllerConfig& cfg,
                          std::mt19937_64& rng) {
  return reuse_extreme(history, cfg, rng, [](double c, double b) { return c <= b; });
}

MotorCommand choose_maxpe(const ErrorHistory& history, const ControllerConfig& cfg,
                          std::mt19937_64& rng) {
  return reuse_extreme(history, cfg, rng, [](double c, double b) { return c >= b; });
}

double sliding_mean_error(const ErrorHistory& history, std::int64_t tau, std::size_t em_window) {
  if (em_window < 1) throw UsageError("sliding_mean_error: em_window must be at least 1");
  auto mean = try_sliding_mean(history, tau, em_window);
  if (!mean) throw RangeError("sliding_mean_error: no records in window ending at t=" +
                              std::to_string(tau));
  return *mean;
}

MotorCommand choose_maxlp(const ErrorHistory& history, const ControllerConfig& cfg,
                          std::mt19937_64& rng) {
  if (explore(cfg, rng)) return choose_random(rng);

  struct Candidate {
    std::size_t index;
    double progress;
  };
  std::vector<Candidate> candidates;
  double scale = 0.0;
  for (std::size_t i = window_start(history, cfg.window); i < history.size(); ++i) {
    const auto tau = history[i].t;
    const auto now = try_sliding_mean(history, tau, cfg.em_window);
    const auto before = try_sliding_mean(history, tau - 1, cfg.em_window);
    if (!now || !before) continue;
    candidates.push_back({i, *before - *now});
    scale = std::max({scale, std::abs(*now), std::abs(*before)});
  }
  if (candidates.empty()) return choose_random(rng);

  // Means over different record counts carry rounding noise, so progress values
  // within a relative 1e-9 of the maximum count as tied.
  double best = candidates.front().progress;
  for (const auto& c : candidates) best = std::max(best, c.progress);
  const double tie = 1e-9 * scale;
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it)
    if (it->progress >= best - tie) return history[it->index].cmd;
  return history[candidates.back().index].cmd;
}

MotorCommand choose_action(const ErrorHistory& history, const ControllerConfig& cfg,
                           std::mt19937_64& rng) {
  switch (cfg.kind) {
    case ControllerKind::RM: return choose_random(rng);
    case ControllerKind::MinPE: return choose_minpe(history, cfg, rng);
    case ControllerKind::MaxPE: return choose_maxpe(history, cfg, rng);
    case ControllerKind::MaxLP: return choose_maxlp(history, cfg, rng);
  }
  return choose_random(rng);
}

}  // namespace sensorimotor
