#include "sensorimotor/elm_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace sensorimotor {
namespace {

constexpr std::array<char, 4> kMagic{'E', 'L', 'M', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw IoError("model dump: unexpected end of file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_model(std::ostream& out, const ElmState<double>& state) {
  const auto& w = state.input_weights();
  const auto& b = state.bias();
  const auto& beta = state.readout();
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(state.input_dim()));
  put_u64(out, static_cast<std::uint64_t>(state.output_dim()));
  put_u64(out, static_cast<std::uint64_t>(state.hidden_count()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
  for (Eigen::Index i = 0; i < b.size(); ++i) put_f64(out, b(i));
  for (Eigen::Index r = 0; r < beta.rows(); ++r)
    for (Eigen::Index c = 0; c < beta.cols(); ++c) put_f64(out, beta(r, c));
  if (!out) throw IoError("model dump: write failed");
}

void write_model(const std::filesystem::path& path, const ElmState<double>& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_model(out, state);
}

ElmState<double> read_model(std::istream& in, Activation activation, double online_init_scale) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw IoError("model dump: bad magic");
  const auto n = get_u64(in);
  const auto p = get_u64(in);
  const auto hidden = get_u64(in);
  constexpr std::uint64_t kLimit = 1u << 24;
  if (n == 0 || p == 0 || hidden == 0 || n > kLimit || p > kLimit || hidden > kLimit)
    throw IoError("model dump: implausible dimensions");

  const auto rows = static_cast<Eigen::Index>(hidden);
  DenseMatrix<double> w(rows, static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_f64(in);
  DenseVector<double> b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) b(i) = get_f64(in);
  DenseMatrix<double> beta(static_cast<Eigen::Index>(p), rows);
  for (Eigen::Index r = 0; r < beta.rows(); ++r)
    for (Eigen::Index c = 0; c < beta.cols(); ++c) beta(r, c) = get_f64(in);

  DenseMatrix<double> p_aux = DenseMatrix<double>::Identity(rows, rows) / online_init_scale;
  return ElmState<double>(std::move(w), std::move(b), std::move(beta), std::move(p_aux),
                          activation);
}

ElmState<double> read_model(const std::filesystem::path& path, Activation activation,
                            double online_init_scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_model(in, activation, online_init_scale);
}

}  // namespace sensorimotor
