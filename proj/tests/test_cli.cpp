#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sensorimotor/cli.hpp"
#include "sensorimotor/errors.hpp"
#include "sensorimotor/report.hpp"

using namespace sensorimotor;
namespace fs = std::filesystem;

namespace {

cli::CliConfig parse(std::vector<std::string> args) { return cli::parse_args(args); }

int run(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run_cli(args, o, e);
  if (out) *out = o.str() + e.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sensorimotor_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("parse_args: run defaults and flags") {
  auto c = parse({"run", "--controller", "rm", "--seed", "1"});
  CHECK(c.subcommand == cli::Subcommand::Run);
  CHECK(c.experiment.controller.kind == ControllerKind::RM);
  CHECK(c.experiment.steps == 5000);
  CHECK(c.experiment.master_seed == 1);

  c = parse({"run", "--controller", "minpe", "--epsilon", "0.2"});
  CHECK(c.experiment.controller.kind == ControllerKind::MinPE);
  CHECK(c.experiment.controller.epsilon == 0.2);

  c = parse({"run", "--hidden", "12", "--sigma", "0", "--window", "7", "--em-window", "3", "--steps", "9"});
  CHECK(c.experiment.elm.hidden_count == 12);
  CHECK(c.experiment.noise.sigma == 0.0);
  CHECK(c.experiment.controller.window == 7);
  CHECK(c.experiment.controller.em_window == 3);
  CHECK(c.experiment.steps == 9);
}

TEST_CASE("parse_args: rejects bad input") {
  CHECK_THROWS_AS(parse({"run", "--controller", "xyz"}), UsageError);
  CHECK_THROWS_AS(parse({"run", "--set", "nonsense=1"}), UsageError);
  CHECK_THROWS_AS(parse({"run", "--set", "steps"}), UsageError);
  CHECK_THROWS_AS(parse({"run", "--set", "steps=abc"}), UsageError);
  CHECK_THROWS_AS(parse({"run", "--epsilon", "2"}), UsageError);
  CHECK_THROWS_AS(parse({"run", "--bogus"}), UsageError);
  CHECK_THROWS_AS(parse({}), UsageError);
  CHECK_THROWS_AS(parse({"compare", "--seeds", "1,,2"}), UsageError);
}

TEST_CASE("parse_args: precedence defaults < config < set < flags") {
  const auto dir = scratch("precedence");
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"steps": 77, "epsilon": 0.5, "controller": "maxpe", "camera_w": 8})";
  auto c = parse({"run", "--config", (dir / "cfg.json").string()});
  CHECK(c.experiment.steps == 77);
  CHECK(c.experiment.controller.kind == ControllerKind::MaxPE);
  CHECK(c.experiment.elm.output_dim == 8 * 32);
  c = parse({"run", "--config", (dir / "cfg.json").string(), "--set", "steps=88", "--set", "epsilon=0.3"});
  CHECK(c.experiment.steps == 88);
  CHECK(c.experiment.controller.epsilon == 0.3);
  c = parse({"run", "--config", (dir / "cfg.json").string(), "--set", "steps=88", "--steps", "99"});
  CHECK(c.experiment.steps == 99);
  CHECK(c.experiment.controller.epsilon == 0.5);
}

TEST_CASE("parse_args: compare defaults") {
  const auto c = parse({"compare"});
  CHECK(c.subcommand == cli::Subcommand::Compare);
  CHECK(c.seeds.size() == 10);
  CHECK(c.kinds.size() == 4);
  const auto d = parse({"compare", "--seeds", "4,9", "--controllers", "rm,maxlp"});
  CHECK(d.seeds == std::vector<std::uint64_t>{4, 9});
  CHECK(d.kinds == std::vector<ControllerKind>{ControllerKind::RM, ControllerKind::MaxLP});
}

TEST_CASE("run: output files and exit codes") {
  const auto dir = scratch("run");
  REQUIRE(run({"run", "--steps", "2", "--out", dir.string(), "--dump-model"}) == 0);
  const auto trace = slurp(dir / "trace.csv");
  CHECK(count_lines(trace) == 3);
  CHECK(trace.rfind("t,cam_center_x,cam_center_y,cmd,error\n", 0) == 0);
  CHECK(trace.find("\n0,256,256,") != std::string::npos);
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(fs::exists(dir / "frame_actual.pgm"));
  CHECK(fs::exists(dir / "frame_predicted.pgm"));
  CHECK(fs::file_size(dir / "model.elm") == 4 + 24 + 8 * (30 * 1026 + 30 + 1024 * 30));

  CHECK(run({"run", "--controller", "xyz"}) == cli::kExitUsage);
  CHECK(run({"run", "--image", (dir / "missing.pgm").string(), "--out", dir.string()}) == cli::kExitIo);
  std::ofstream(dir / "bad.pgm") << "P2 2 2 255 0 1";
  CHECK(run({"run", "--image", (dir / "bad.pgm").string(), "--out", dir.string()}) == cli::kExitRuntime);
  std::string help;
  CHECK(run({"--help"}, &help) == 0);
  CHECK(help.find("compare") != std::string::npos);
}

TEST_CASE("run: commands are encoded as single letters") {
  const auto dir = scratch("codes");
  REQUIRE(run({"run", "--steps", "200", "--window", "5", "--controller", "maxpe", "--out", dir.string()}) == 0);
  const auto rows = parse_trace_csv(slurp(dir / "trace.csv"), 32, 32);
  CHECK(rows.size() == 200);
  std::istringstream in(slurp(dir / "trace.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto field = line.substr(line.find(',', line.find(',', line.find(',') + 1) + 1) + 1, 1);
    CHECK(std::string("UDLRS").find(field) != std::string::npos);
  }
}

TEST_CASE("run: reruns are byte-identical") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run({"run", "--steps", "300", "--seed", "42", "--out", a.string()}) == 0);
  REQUIRE(run({"run", "--steps", "300", "--seed", "42", "--out", b.string()}) == 0);
  for (const char* f : {"trace.csv", "metrics.csv", "frame_actual.pgm", "frame_predicted.pgm"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("compare: summary and ranking tables") {
  const auto dir = scratch("compare");
  REQUIRE(run({"compare", "--steps", "40", "--seeds", "1,2,3", "--out", dir.string()}) == 0);
  const auto summary = slurp(dir / "summary.csv");
  CHECK(count_lines(summary) == 5);
  std::istringstream rows(summary);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    const double stay = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(stay >= 0.0);
    CHECK(stay <= 1.0);
  }
  std::istringstream rank(slurp(dir / "ranking.csv"));
  std::getline(rank, line);
  CHECK(line == "seed,rank1,rank2,rank3,rank4");
  int n = 0;
  while (std::getline(rank, line)) {
    std::set<std::string> names;
    std::istringstream fields(line.substr(line.find(',') + 1));
    for (std::string f; std::getline(fields, f, ',');) names.insert(f);
    CHECK(names == std::set<std::string>{"RM", "MinPE", "MaxPE", "MaxLP"});
    ++n;
  }
  CHECK(n == 3);
  CHECK(fs::exists(dir / "traces" / "MaxLP_seed3.csv"));
}

TEST_CASE("validate exits zero when all checks pass") {
  std::string text;
  CHECK(run({"validate"}, &text) == 0);
  CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("render_frames: quantisation") {
  const auto dir = scratch("render");
  fs::create_directories(dir);
  const auto world = synthetic_image(64, 64, 2);
  const CameraState cam{3, 4, 8, 8};
  render_frames(world, cam, Eigen::VectorXd::Constant(64, 0.5), dir / "half");
  const auto half = slurp(dir / "half_predicted.pgm");
  const std::string header = "P5\n8 8\n255\n";
  CHECK(half == header + std::string(64, static_cast<char>(128)));

  render_frames(world, cam, Eigen::VectorXd::Constant(64, 1.7), dir / "hot");
  CHECK(slurp(dir / "hot_predicted.pgm") == header + std::string(64, static_cast<char>(255)));

  render_frames(world, cam, window_pixels(world, cam), dir / "same");
  CHECK(slurp(dir / "same_predicted.pgm") == slurp(dir / "same_actual.pgm"));

  CHECK_THROWS_AS(render_frames(world, cam, Eigen::VectorXd::Zero(10), dir / "x"), DimensionError);
}

TEST_CASE("trace csv round trip") {
  std::vector<StepRecord> trace{{0, 10, 20, MotorCommand::Left, 0.123456789},
                                {1, 9, 20, MotorCommand::Stay, 1.5e-7},
                                {2, 9, 20, MotorCommand::Up, 0.0}};
  const auto text = format_trace_csv(trace, 32, 32);
  CHECK(text.find("\n0,26,36,L,0.123456789\n") != std::string::npos);
  CHECK(parse_trace_csv(text, 32, 32) == trace);
  CHECK_THROWS_AS(parse_trace_csv("bad header\n", 32, 32), UsageError);
}
