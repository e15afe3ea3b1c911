#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "sensorimotor/elm.hpp"

namespace sensorimotor {

// Binary model dump:
//   "ELM1", then n, p, hidden as uint64 little-endian,
//   then W (hidden x n), b (hidden), beta (p x hidden) as float64 little-endian, row-major.
void write_model(std::ostream& out, const ElmState<double>& state);
void write_model(const std::filesystem::path& path, const ElmState<double>& state);

// The dump carries no activation or trainer state; the accumulator restarts at I / delta.
ElmState<double> read_model(std::istream& in, Activation activation = Activation::Logistic,
                            double online_init_scale = 1e-8);
ElmState<double> read_model(const std::filesystem::path& path,
                            Activation activation = Activation::Logistic,
                            double online_init_scale = 1e-8);

}  // namespace sensorimotor
