#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "sensorimotor/world.hpp"

namespace sensorimotor {

struct ErrorRecord {
  std::int64_t t = 0;
  MotorCommand cmd = MotorCommand::Stay;
  double error = 0.0;
};

/// Bounded, time-ordered log of (timestep, command, prediction error).
/// Oldest records are dropped once capacity is reached.
class ErrorHistory {
 public:
  explicit ErrorHistory(std::size_t capacity = 64);

  /// Throws UsageError if t does not increase or error is negative/non-finite.
  void push(const ErrorRecord& record);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const ErrorRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::deque<ErrorRecord>& records() const { return records_; }

 private:
  std::size_t capacity_;
  std::deque<ErrorRecord> records_;
};

enum class ControllerKind { RM, MinPE, MaxPE, MaxLP };

inline constexpr std::array<ControllerKind, 4> kAllControllers{
    ControllerKind::RM, ControllerKind::MinPE, ControllerKind::MaxPE, ControllerKind::MaxLP};

/// "RM", "MinPE", ...
std::string_view controller_name(ControllerKind kind);
/// Case-insensitive: accepts "rm", "minpe", "MaxLP", ...
std::optional<ControllerKind> parse_controller(std::string_view text);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::RM;
  std::size_t window = 20;     // lookback for command reuse
  double epsilon = 0.2;        // probability of a uniformly random command
  std::size_t em_window = 10;  // sliding-mean width for learning progress
  std::uint64_t seed = 0;

  void validate() const;
  /// History length that keeps every window fully populated.
  std::size_t history_capacity() const { return window + em_window + 1; }
};

MotorCommand choose_random(std::mt19937_64& rng);

/// Reuses the command of the lowest-error record among the last `window`;
/// latest record wins ties. Random with probability epsilon or on empty history.
MotorCommand choose_minpe(const ErrorHistory& history, const ControllerConfig& cfg,
                          std::mt19937_64& rng);

/// As choose_minpe with the highest-error record.
MotorCommand choose_maxpe(const ErrorHistory& history, const ControllerConfig& cfg,
                          std::mt19937_64& rng);

/// Mean error over records with timestep in (tau - em_window, tau].
/// Throws RangeError when no record falls in that range.
double sliding_mean_error(const ErrorHistory& history, std::int64_t tau, std::size_t em_window);

/// Learning progress LP(tau) = em(tau - 1) - em(tau) for each of the last
/// `window` records; reuses the command of the record with the largest LP.
MotorCommand choose_maxlp(const ErrorHistory& history, const ControllerConfig& cfg,
                          std::mt19937_64& rng);

MotorCommand choose_action(const ErrorHistory& history, const ControllerConfig& cfg,
                           std::mt19937_64& rng);

}  // namespace sensorimotor
