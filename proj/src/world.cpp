#include "sensorimotor/world.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <vector>

#include "sensorimotor/errors.hpp"

namespace sensorimotor {

char command_code(MotorCommand cmd) {
  switch (cmd) {
    case MotorCommand::Up: return 'U';
    case MotorCommand::Down: return 'D';
    case MotorCommand::Left: return 'L';
    case MotorCommand::Right: return 'R';
    case MotorCommand::Stay: return 'S';
  }
  return '?';
}

std::optional<MotorCommand> command_from_code(char code) {
  for (auto cmd : kAllCommands)
    if (command_code(cmd) == code) return cmd;
  return std::nullopt;
}

Eigen::Vector2d motor_vector(MotorCommand cmd) {
  const auto v = command_to_velocity(cmd);
  return {static_cast<double>(v.vx), static_cast<double>(v.vy)};
}

WorldImage::WorldImage(PixelArray pixels) : pixels_(std::move(pixels)) {
  if (pixels_.rows() < 1 || pixels_.cols() < 1) throw ConfigError("world image must be non-empty");
  if (!pixels_.allFinite() || pixels_.minCoeff() < 0.0 || pixels_.maxCoeff() > 1.0)
    throw ConfigError("world image pixels must lie in [0, 1]");
}

bool camera_fits(const WorldImage& world, const CameraState& cam) {
  return cam.window_w >= 1 && cam.window_h >= 1 && cam.x >= 0 && cam.y >= 0 &&
         cam.x + cam.window_w <= world.width() && cam.y + cam.window_h <= world.height();
}

CameraState centered_camera(const WorldImage& world, int window_w, int window_h) {
  if (window_w < 1 || window_h < 1 || window_w > world.width() || window_h > world.height())
    throw ConfigError("camera window does not fit the image");
  return {(world.width() - window_w) / 2, (world.height() - window_h) / 2, window_w, window_h};
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_uint(const char* what) {
    skip_space_and_comments();
    const auto start = pos_;
    unsigned long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
      if (v > 0xFFFFFFFFul) throw ParseError(std::string("pgm: ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("pgm: expected ") + what, start);
    if (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#')
      throw ParseError(std::string("pgm: malformed ") + what, pos_);
    return v;
  }

  std::uint8_t byte() { return bytes_[pos_++]; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

WorldImage load_image(std::span<const std::uint8_t> bytes) {
  PgmReader in(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("pgm: missing magic number", 0);
  const bool binary = bytes[1] == '5';
  if (!binary && bytes[1] != '2') throw ParseError("pgm: unsupported format (need P2 or P5)", 1);
  in.advance(2);

  const auto width = in.read_uint("width");
  const auto height = in.read_uint("height");
  const auto maxval = in.read_uint("maxval");
  if (width == 0 || height == 0) throw ParseError("pgm: zero image dimension", in.pos());
  if (maxval == 0 || maxval > 65535) throw ParseError("pgm: maxval must be in 1..65535", in.pos());
  if (width * height > (1ul << 28)) throw ParseError("pgm: image too large", in.pos());

  PixelArray pixels(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
  const double scale = 1.0 / static_cast<double>(maxval);
  const std::size_t count = width * height;

  if (binary) {
    if (in.remaining() < 1) throw ParseError("pgm: missing pixel data", in.pos());
    in.advance(1);  // single whitespace after maxval
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (in.remaining() < count * bpp)
      throw ParseError("pgm: truncated pixel data (expected " + std::to_string(count * bpp) +
                           " bytes, found " + std::to_string(in.remaining()) + ")",
                       in.pos());
    for (std::size_t i = 0; i < count; ++i) {
      const auto at = in.pos();
      unsigned long v = in.byte();
      if (bpp == 2) v = (v << 8) | in.byte();
      if (v > maxval) throw ParseError("pgm: pixel exceeds maxval", at);
      pixels(static_cast<Eigen::Index>(i / width), static_cast<Eigen::Index>(i % width)) =
          static_cast<double>(v) * scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      in.skip_space_and_comments();
      if (in.remaining() == 0) throw ParseError("pgm: truncated pixel data", in.pos());
      const auto at = in.pos();
      const auto v = in.read_uint("pixel value");
      if (v > maxval) throw ParseError("pgm: pixel exceeds maxval", at);
      pixels(static_cast<Eigen::Index>(i / width), static_cast<Eigen::Index>(i % width)) =
          static_cast<double>(v) * scale;
    }
  }
  return WorldImage(std::move(pixels));
}

WorldImage load_image(std::string_view bytes) {
  return load_image(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

WorldImage load_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_image(std::span<const std::uint8_t>(bytes));
}

std::uint8_t quantize_pixel(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

std::string encode_pgm(const PixelArray& pixels, PgmEncoding encoding) {
  const bool binary = encoding == PgmEncoding::Binary;
  std::string out = std::string(binary ? "P5\n" : "P2\n") + std::to_string(pixels.cols()) + " " +
                    std::to_string(pixels.rows()) + "\n255\n";
  for (Eigen::Index r = 0; r < pixels.rows(); ++r) {
    for (Eigen::Index c = 0; c < pixels.cols(); ++c) {
      const auto q = quantize_pixel(pixels(r, c));
      if (binary) {
        out.push_back(static_cast<char>(q));
      } else {
        out += std::to_string(q);
        out.push_back(c + 1 == pixels.cols() ? '\n' : ' ');
      }
    }
  }
  return out;
}

WorldImage synthetic_image(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1) throw ConfigError("synthetic image needs positive dimensions");
  constexpr int kComponents = 8;
  std::mt19937_64 rng(seed);
  // Wavelengths from half to twice the default 32 px window, so every frame has texture.
  std::uniform_real_distribution<double> wavelength(16.0, 64.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amplitude(0.5, 1.0);

  struct Wave {
    double kx, ky, phi, amp;
  };
  std::array<Wave, kComponents> waves{};
  for (auto& w : waves) {
    const double k = 2.0 * std::numbers::pi / wavelength(rng);
    const double theta = angle(rng);
    w = {k * std::cos(theta), k * std::sin(theta), phase(rng), amplitude(rng)};
  }

  PixelArray pixels(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      for (const auto& w : waves) v += w.amp * std::sin(w.kx * x + w.ky * y + w.phi);
      pixels(y, x) = v;
    }
  const double lo = pixels.minCoeff();
  const double span = pixels.maxCoeff() - lo;
  pixels = span > 0 ? ((pixels - lo) / span).eval() : PixelArray::Constant(height, width, 0.5);
  return WorldImage(std::move(pixels));
}

CameraState apply_motor(const WorldImage& world, const CameraState& cam, MotorCommand cmd) {
  const auto v = command_to_velocity(cmd);
  CameraState next = cam;
  next.x = std::clamp(cam.x + v.vx, 0, std::max(0, world.width() - cam.window_w));
  next.y = std::clamp(cam.y + v.vy, 0, std::max(0, world.height() - cam.window_h));
  return next;
}

SensorFrame window_pixels(const WorldImage& world, const CameraState& cam) {
  if (!camera_fits(world, cam)) throw ConfigError("camera window outside the image");
  SensorFrame frame(static_cast<Eigen::Index>(cam.window_w) * cam.window_h);
  Eigen::Map<PixelArray>(frame.data(), cam.window_h, cam.window_w) =
      world.pixels().block(cam.y, cam.x, cam.window_h, cam.window_w);
  return frame;
}

SensorFrame observe(const WorldImage& world, const CameraState& cam, const NoiseModel& noise,
                    std::mt19937_64& rng) {
  SensorFrame frame = window_pixels(world, cam);
  if (noise.sigma > 0) {
    std::normal_distribution<double> gauss(0.0, noise.sigma);
    for (Eigen::Index i = 0; i < frame.size(); ++i)
      frame(i) = std::clamp(frame(i) + gauss(rng), 0.0, 1.0);
  }
  return frame;
}

}  // namespace sensorimotor
