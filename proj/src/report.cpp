#include "sensorimotor/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sensorimotor/errors.hpp"

namespace sensorimotor {
namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw UsageError("trace csv line " + std::to_string(line) + ": bad field '" +
                     std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

std::string format_trace_csv(std::span<const StepRecord> trace, int window_w, int window_h) {
  std::string out = "t,cam_center_x,cam_center_y,cmd,error\n";
  const int dx = window_w / 2;
  const int dy = window_h / 2;
  for (const auto& r : trace) {
    out += std::to_string(r.t);
    out += ',';
    out += std::to_string(r.cam_x + dx);
    out += ',';
    out += std::to_string(r.cam_y + dy);
    out += ',';
    out += command_code(r.cmd);
    out += ',';
    out += format_real(r.error);
    out += '\n';
  }
  return out;
}

std::vector<StepRecord> parse_trace_csv(std::string_view csv, int window_w, int window_h) {
  std::vector<StepRecord> trace;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    const auto line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "t,cam_center_x,cam_center_y,cmd,error")
        throw UsageError("trace csv: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5 || fields[3].size() != 1)
      throw UsageError("trace csv line " + std::to_string(line_no) + ": expected 5 fields");
    const auto cmd = command_from_code(fields[3][0]);
    if (!cmd) throw UsageError("trace csv line " + std::to_string(line_no) + ": bad command");
    StepRecord r;
    r.t = parse_number<std::int64_t>(fields[0], line_no);
    r.cam_x = parse_number<int>(fields[1], line_no) - window_w / 2;
    r.cam_y = parse_number<int>(fields[2], line_no) - window_h / 2;
    r.cmd = *cmd;
    r.error = parse_number<double>(fields[4], line_no);
    trace.push_back(r);
  }
  return trace;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_trace_csv(const RunResult& result, const std::filesystem::path& path) {
  write_text_file(path, format_trace_csv(result.trace, result.config.window_w,
                                         result.config.window_h));
}

std::string format_metrics_csv(const Metrics& m) {
  std::string out =
      "final_error,unique_positions,bbox_area,stay_fraction,count_U,count_D,count_L,count_R,"
      "count_S\n";
  out += format_real(m.final_error) + ',' + std::to_string(m.unique_positions) + ',' +
         std::to_string(m.bbox_area) + ',' + format_real(m.stay_fraction());
  for (auto count : m.action_histogram) out += ',' + std::to_string(count);
  out += '\n';
  return out;
}

std::string format_summary_csv(const Comparison& comparison) {
  std::string out =
      "kind,runs,median_final_error,median_unique_positions,median_bbox_area,"
      "median_stay_fraction\n";
  for (const auto& s : comparison.summaries) {
    out += std::string(controller_name(s.kind)) + ',' + std::to_string(s.runs) + ',' +
           format_real(s.median_final_error) + ',' + format_real(s.median_unique_positions) + ',' +
           format_real(s.median_bbox_area) + ',' + format_real(s.median_stay_fraction) + '\n';
  }
  return out;
}

std::string format_ranking_csv(const Comparison& comparison) {
  std::string out = "seed";
  for (std::size_t i = 0; i < comparison.kinds.size(); ++i) out += ",rank" + std::to_string(i + 1);
  out += '\n';
  for (const auto& r : comparison.rankings) {
    out += std::to_string(r.seed);
    for (auto kind : r.order) out += ',' + std::string(controller_name(kind));
    out += '\n';
  }
  return out;
}

void write_summary(const Comparison& comparison, const std::filesystem::path& summary_path,
                   const std::filesystem::path& ranking_path) {
  write_text_file(summary_path, format_summary_csv(comparison));
  write_text_file(ranking_path, format_ranking_csv(comparison));
}

void render_frames(const WorldImage& world, const CameraState& cam,
                   const DenseVector<double>& predicted, const std::filesystem::path& path_prefix) {
  const Eigen::Index p = static_cast<Eigen::Index>(cam.window_w) * cam.window_h;
  if (predicted.size() != p) throw DimensionError("render_frames: prediction length mismatch");
  const SensorFrame actual = window_pixels(world, cam);
  const auto as_image = [&](const DenseVector<double>& v) {
    return PixelArray(Eigen::Map<const PixelArray>(v.data(), cam.window_h, cam.window_w));
  };
  auto base = path_prefix.string();
  write_text_file(base + "_actual.pgm", encode_pgm(as_image(actual)));
  write_text_file(base + "_predicted.pgm", encode_pgm(as_image(predicted)));
}

}  // namespace sensorimotor
