#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "sensorimotor/pseudo_inverse.hpp"

namespace sensorimotor {

enum class MotorCommand : std::uint8_t { Up, Down, Left, Right, Stay };

inline constexpr std::array<MotorCommand, 5> kAllCommands{
    MotorCommand::Up, MotorCommand::Down, MotorCommand::Left, MotorCommand::Right,
    MotorCommand::Stay};

inline constexpr std::size_t kCommandCount = kAllCommands.size();

constexpr std::size_t index_of(MotorCommand cmd) { return static_cast<std::size_t>(cmd); }

/// Single-letter code used in traces: U, D, L, R, S.
char command_code(MotorCommand cmd);
std::optional<MotorCommand> command_from_code(char code);

struct Velocity {
  int vx = 0;
  int vy = 0;
  friend bool operator==(const Velocity&, const Velocity&) = default;
};

/// Image rows grow downward, so Up is (0, -1).
constexpr Velocity command_to_velocity(MotorCommand cmd) {
  switch (cmd) {
    case MotorCommand::Up: return {0, -1};
    case MotorCommand::Down: return {0, 1};
    case MotorCommand::Left: return {-1, 0};
    case MotorCommand::Right: return {1, 0};
    case MotorCommand::Stay: return {0, 0};
  }
  return {0, 0};
}

/// Motor part of the predictor input (q = 2).
Eigen::Vector2d motor_vector(MotorCommand cmd);

using PixelArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Static greyscale image with intensities in [0, 1], indexed (row = y, col = x).
class WorldImage {
 public:
  explicit WorldImage(PixelArray pixels);

  int width() const { return static_cast<int>(pixels_.cols()); }
  int height() const { return static_cast<int>(pixels_.rows()); }
  double at(int x, int y) const { return pixels_(y, x); }
  const PixelArray& pixels() const { return pixels_; }

 private:
  PixelArray pixels_;
};

struct CameraState {
  int x = 0;  // top-left column
  int y = 0;  // top-left row
  int window_w = 32;
  int window_h = 32;
  friend bool operator==(const CameraState&, const CameraState&) = default;
};

bool camera_fits(const WorldImage& world, const CameraState& cam);

/// Window centred in the image (top-left rounded down).
CameraState centered_camera(const WorldImage& world, int window_w, int window_h);

struct NoiseModel {
  double sigma = 0.01;
};

using SensorFrame = DenseVector<double>;

/// Parses a binary (P5) or ASCII (P2) PGM; values are scaled by 1/maxval.
WorldImage load_image(std::span<const std::uint8_t> bytes);
WorldImage load_image(std::string_view bytes);
WorldImage load_image_file(const std::filesystem::path& path);

enum class PgmEncoding { Binary, Ascii };

/// Quantises [0,1] intensities to 0..255 (clamped, round half up).
std::uint8_t quantize_pixel(double v);
std::string encode_pgm(const PixelArray& pixels, PgmEncoding encoding = PgmEncoding::Binary);

/// Smooth seeded test scene: a normalised mixture of plane-wave sinusoids.
WorldImage synthetic_image(int width = 512, int height = 512, std::uint64_t seed = 1);

/// Translate by the command's velocity, clamped so the window stays inside the image.
CameraState apply_motor(const WorldImage& world, const CameraState& cam, MotorCommand cmd);

/// Window contents, row-major.
SensorFrame window_pixels(const WorldImage& world, const CameraState& cam);

/// Window contents plus i.i.d. N(0, sigma^2) noise, clamped to [0, 1].
SensorFrame observe(const WorldImage& world, const CameraState& cam, const NoiseModel& noise,
                    std::mt19937_64& rng);

}  // namespace sensorimotor
