#include <random>
#include <string>

#include "doctest.h"
#include "sensorimotor/errors.hpp"
#include "sensorimotor/world.hpp"

using namespace sensorimotor;

namespace {

WorldImage checkerboard(int w, int h) {
  PixelArray p(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) p(y, x) = (x + y) % 2 ? 1.0 : 0.0;
  return WorldImage(p);
}

WorldImage constant(int w, int h, double v) { return WorldImage(PixelArray::Constant(h, w, v)); }

}  // namespace

TEST_CASE("load_image: ASCII P2") {
  const auto img = load_image(std::string_view("P2 2 2 255\n0 255\n255 0\n"));
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 2);
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(1, 0) == 1.0);
  CHECK(img.at(0, 1) == 1.0);
  CHECK(img.at(1, 1) == 0.0);
}

TEST_CASE("load_image: binary P5 and comments") {
  std::string bytes = "P5\n# a comment\n3 2\n255\n";
  bytes.append(6, static_cast<char>(128));
  const auto img = load_image(std::string_view(bytes));
  CHECK(img.width() == 3);
  CHECK((img.pixels() - 128.0 / 255.0).abs().maxCoeff() < 1e-15);
  CHECK(img.at(0, 0) == doctest::Approx(0.50196).epsilon(1e-5));
}

TEST_CASE("load_image: 16-bit P5 is big-endian") {
  std::string bytes = "P5 1 1 65535\n";
  bytes.push_back(static_cast<char>(0x80));
  bytes.push_back(static_cast<char>(0x00));
  CHECK(load_image(std::string_view(bytes)).at(0, 0) == doctest::Approx(32768.0 / 65535.0));
}

TEST_CASE("load_image: malformed inputs") {
  std::string truncated = "P5 4 4 255\n";
  truncated.append(10, 'a');
  CHECK_THROWS_AS(load_image(std::string_view(truncated)), ParseError);
  CHECK_THROWS_AS(load_image(std::string_view("P3 1 1 255 0 0 0")), ParseError);
  CHECK_THROWS_AS(load_image(std::string_view("P2 2 2 255 0 1 2")), ParseError);
  CHECK_THROWS_AS(load_image(std::string_view("P2 1 1 10 11")), ParseError);
  CHECK_THROWS_AS(load_image(std::string_view("P2 0 1 255")), ParseError);
  try {
    load_image(std::string_view("P2 2 2 255 0 1 x 3"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 10);
  }
}

TEST_CASE("load_image: P2 round trip is the identity on pixels") {
  const auto img = synthetic_image(31, 19, 9);
  const auto once = load_image(encode_pgm(img.pixels(), PgmEncoding::Ascii));
  const auto twice = load_image(encode_pgm(once.pixels(), PgmEncoding::Ascii));
  CHECK((once.pixels() == twice.pixels()).all());
  const auto binary = load_image(encode_pgm(once.pixels(), PgmEncoding::Binary));
  CHECK((once.pixels() == binary.pixels()).all());
}

TEST_CASE("quantize_pixel") {
  CHECK(quantize_pixel(0.5) == 128);
  CHECK(quantize_pixel(1.7) == 255);
  CHECK(quantize_pixel(-0.2) == 0);
  CHECK(quantize_pixel(1.0) == 255);
}

TEST_CASE("WorldImage rejects out-of-range pixels") {
  CHECK_THROWS(WorldImage(PixelArray::Constant(2, 2, 1.5)));
}

TEST_CASE("synthetic_image: size, range and determinism") {
  const auto a = synthetic_image();
  CHECK(a.width() == 512);
  CHECK(a.height() == 512);
  CHECK(a.pixels().minCoeff() == doctest::Approx(0.0));
  CHECK(a.pixels().maxCoeff() == doctest::Approx(1.0));
  CHECK((synthetic_image(64, 64, 3).pixels() == synthetic_image(64, 64, 3).pixels()).all());
  CHECK(!(synthetic_image(64, 64, 3).pixels() == synthetic_image(64, 64, 4).pixels()).all());
}

TEST_CASE("command_to_velocity") {
  CHECK(command_to_velocity(MotorCommand::Stay) == Velocity{0, 0});
  CHECK(command_to_velocity(MotorCommand::Right) == Velocity{1, 0});
  CHECK(command_to_velocity(MotorCommand::Left) == Velocity{-1, 0});
  CHECK(command_to_velocity(MotorCommand::Up) == Velocity{0, -1});
  CHECK(command_to_velocity(MotorCommand::Down) == Velocity{0, 1});
  CHECK(motor_vector(MotorCommand::Up) == Eigen::Vector2d(0, -1));
  for (auto c : kAllCommands) CHECK(command_from_code(command_code(c)) == c);
  CHECK(!command_from_code('X'));
}

TEST_CASE("apply_motor: translation and clamping") {
  const auto world = constant(512, 512, 0.3);
  CHECK(apply_motor(world, {0, 0, 32, 32}, MotorCommand::Left) == CameraState{0, 0, 32, 32});
  CHECK(apply_motor(world, {240, 240, 32, 32}, MotorCommand::Right) == CameraState{241, 240, 32, 32});
  CHECK(apply_motor(world, {480, 10, 32, 32}, MotorCommand::Right) == CameraState{480, 10, 32, 32});
  CHECK(apply_motor(world, {5, 480, 32, 32}, MotorCommand::Down) == CameraState{5, 480, 32, 32});
  CHECK(apply_motor(world, {5, 0, 32, 32}, MotorCommand::Up) == CameraState{5, 0, 32, 32});
}

TEST_CASE("apply_motor: fuzzed command sequences stay in bounds") {
  const auto world = constant(70, 45, 0.1);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick(0, 4);
  CameraState cam{3, 3, 16, 16};
  for (int k = 0; k < 100000; ++k) {
    const auto next = apply_motor(world, cam, kAllCommands[static_cast<std::size_t>(pick(rng))]);
    REQUIRE(camera_fits(world, next));
    REQUIRE(std::abs(next.x - cam.x) + std::abs(next.y - cam.y) <= 1);
    cam = next;
  }
}

TEST_CASE("apply_motor: opposite commands cancel unless clamped") {
  const auto world = constant(20, 20, 0.1);
  for (int x = 0; x <= 16; ++x)
    for (int y = 0; y <= 16; ++y) {
      const CameraState c{x, y, 4, 4};
      if (x < 16) CHECK(apply_motor(world, apply_motor(world, c, MotorCommand::Right), MotorCommand::Left) == c);
      if (x > 0) CHECK(apply_motor(world, apply_motor(world, c, MotorCommand::Left), MotorCommand::Right) == c);
      if (y < 16) CHECK(apply_motor(world, apply_motor(world, c, MotorCommand::Down), MotorCommand::Up) == c);
      if (y > 0) CHECK(apply_motor(world, apply_motor(world, c, MotorCommand::Up), MotorCommand::Down) == c);
    }
}

TEST_CASE("centered_camera") {
  const auto world = constant(512, 512, 0.0);
  CHECK(centered_camera(world, 32, 32) == CameraState{240, 240, 32, 32});
  CHECK_THROWS_AS(centered_camera(world, 600, 32), ConfigError);
}

TEST_CASE("observe: noise-free slicing") {
  const auto world = checkerboard(4, 4);
  std::mt19937_64 rng(1);
  const auto frame = observe(world, {1, 1, 2, 2}, NoiseModel{0.0}, rng);
  REQUIRE(frame.size() == 4);
  CHECK(frame(0) == world.at(1, 1));
  CHECK(frame(1) == world.at(2, 1));
  CHECK(frame(2) == world.at(1, 2));
  CHECK(frame(3) == world.at(2, 2));
  CHECK(frame == observe(world, {1, 1, 2, 2}, NoiseModel{0.0}, rng));

  const auto scene = synthetic_image(60, 50, 2);
  const CameraState cam{13, 7, 11, 9};
  const auto f = observe(scene, cam, NoiseModel{0.0}, rng);
  REQUIRE(f.size() == 99);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 11; ++c) CHECK(f(r * 11 + c) == scene.at(13 + c, 7 + r));
}

TEST_CASE("observe: noise statistics") {
  const auto world = constant(64, 64, 0.5);
  std::mt19937_64 rng(5);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  while (n < 100000) {
    const auto f = observe(world, {10, 10, 32, 32}, NoiseModel{0.01}, rng);
    sum += f.sum();
    sq += (f.array() - 0.5).square().sum();
    n += static_cast<std::size_t>(f.size());
  }
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sq / static_cast<double>(n) - (mean - 0.5) * (mean - 0.5));
  CHECK(std::abs(mean - 0.5) < 0.001);
  CHECK(std::abs(sd - 0.01) < 0.001);
}

TEST_CASE("observe: clamped to the unit interval") {
  const auto world = constant(8, 8, 1.0);
  std::mt19937_64 rng(5);
  const auto f = observe(world, {0, 0, 8, 8}, NoiseModel{0.5}, rng);
  CHECK(f.maxCoeff() <= 1.0);
  CHECK(f.minCoeff() >= 0.0);
}
