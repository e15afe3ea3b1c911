#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sensorimotor/harness.hpp"

namespace sensorimotor {

// Trace CSV: header `t,cam_center_x,cam_center_y,cmd,error`, one row per step,
// LF endings, error printed with 9 significant digits. The centre is the
// top-left corner plus half the window size.
std::string format_trace_csv(std::span<const StepRecord> trace, int window_w, int window_h);
std::vector<StepRecord> parse_trace_csv(std::string_view csv, int window_w, int window_h);
void write_trace_csv(const RunResult& result, const std::filesystem::path& path);

std::string format_metrics_csv(const Metrics& metrics);

// Per-kind medians, one row per controller kind.
std::string format_summary_csv(const Comparison& comparison);
// One row per seed: the kinds in ascending final-error order.
std::string format_ranking_csv(const Comparison& comparison);
void write_summary(const Comparison& comparison, const std::filesystem::path& summary_path,
                   const std::filesystem::path& ranking_path);

/// Writes `<prefix>_actual.pgm` (noise-free window) and `<prefix>_predicted.pgm`
/// (clamped to [0,1], quantised to 0..255 with round-half-up).
void render_frames(const WorldImage& world, const CameraState& cam,
                   const DenseVector<double>& predicted, const std::filesystem::path& path_prefix);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace sensorimotor
