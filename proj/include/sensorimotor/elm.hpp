#pragma once

// Extreme Learning Machine for one-step sensor prediction.
//
// The hidden layer (W, b) is drawn once from a seeded PRNG and never changes.
// Only the linear readout beta is trained, either in one shot through the
// pseudo-inverse of the hidden-layer matrix or sample by sample with
// recursive least squares over the fixed hidden features.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "sensorimotor/errors.hpp"
#include "sensorimotor/pseudo_inverse.hpp"

namespace sensorimotor {

enum class Activation { Logistic, Tanh };

struct ElmConfig {
  Eigen::Index input_dim = 1026;  // sensor dimension + motor dimension
  Eigen::Index output_dim = 1024;
  Eigen::Index hidden_count = 30;
  Activation activation = Activation::Logistic;
  double weight_init_low = -1.0;
  double weight_init_high = 1.0;
  double bias_init_low = 0.0;
  double bias_init_high = 1.0;
  // Initial inverse-correlation matrix for the online trainer is I / delta.
  double online_init_scale = 1e-8;
  std::uint64_t seed = 0;

  void validate() const {
    if (input_dim < 1 || output_dim < 1 || hidden_count < 1)
      throw ConfigError("elm: input_dim, output_dim and hidden_count must be positive");
    if (!(weight_init_low < weight_init_high))
      throw ConfigError("elm: weight_init_low must be below weight_init_high");
    if (!(bias_init_low <= bias_init_high))
      throw ConfigError("elm: bias_init_low must not exceed bias_init_high");
    if (!(online_init_scale > 0) || !std::isfinite(online_init_scale))
      throw ConfigError("elm: online_init_scale must be a positive finite number");
  }
};

template <typename Scalar>
struct TrainingPair {
  DenseVector<Scalar> x;  // [sensor; motor]
  DenseVector<Scalar> y;  // next sensor frame
};

template <typename Scalar>
class ElmState;

template <typename Scalar>
void update_online(ElmState<Scalar>& state, const DenseVector<Scalar>& x,
                   const DenseVector<Scalar>& y);

template <typename Scalar>
ElmState<Scalar> fit_batch(const ElmState<Scalar>& state,
                           std::span<const TrainingPair<Scalar>> pairs);

/// Network parameters plus the online trainer's accumulator.
/// The hidden layer is only reachable through const accessors.
template <typename Scalar>
class ElmState {
 public:
  using Matrix = DenseMatrix<Scalar>;
  using Vector = DenseVector<Scalar>;

  ElmState(Matrix input_weights, Vector bias, Matrix readout, Matrix inverse_correlation,
           Activation activation, std::uint64_t samples_seen = 0)
      : w_(std::move(input_weights)),
        b_(std::move(bias)),
        beta_(std::move(readout)),
        p_aux_(std::move(inverse_correlation)),
        activation_(activation),
        samples_seen_(samples_seen) {
    const auto hidden = w_.rows();
    if (hidden < 1 || w_.cols() < 1 || b_.size() != hidden || beta_.cols() != hidden ||
        beta_.rows() < 1 || p_aux_.rows() != hidden || p_aux_.cols() != hidden)
      throw DimensionError("elm: inconsistent parameter shapes");
  }

  Eigen::Index input_dim() const { return w_.cols(); }
  Eigen::Index output_dim() const { return beta_.rows(); }
  Eigen::Index hidden_count() const { return w_.rows(); }

  const Matrix& input_weights() const { return w_; }
  const Vector& bias() const { return b_; }
  const Matrix& readout() const { return beta_; }
  const Matrix& inverse_correlation() const { return p_aux_; }
  Activation activation() const { return activation_; }
  std::uint64_t samples_seen() const { return samples_seen_; }

  friend bool operator==(const ElmState& a, const ElmState& b) {
    return a.activation_ == b.activation_ && a.samples_seen_ == b.samples_seen_ &&
           a.w_ == b.w_ && a.b_ == b.b_ && a.beta_ == b.beta_ && a.p_aux_ == b.p_aux_;
  }

 private:
  friend void update_online<Scalar>(ElmState&, const Vector&, const Vector&);
  friend ElmState fit_batch<Scalar>(const ElmState&, std::span<const TrainingPair<Scalar>>);

  Matrix w_;
  Vector b_;
  Matrix beta_;
  Matrix p_aux_;
  Activation activation_;
  std::uint64_t samples_seen_;
};

template <typename Scalar = double>
ElmState<Scalar> init_elm(const ElmConfig& config) {
  config.validate();
  const auto hidden = config.hidden_count;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> weight(config.weight_init_low, config.weight_init_high);

  DenseMatrix<Scalar> w(hidden, config.input_dim);
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<Scalar>(weight(rng));

  DenseVector<Scalar> b(hidden);
  if (config.bias_init_low == config.bias_init_high) {
    b.setConstant(static_cast<Scalar>(config.bias_init_low));
  } else {
    std::uniform_real_distribution<double> bias(config.bias_init_low, config.bias_init_high);
    for (Eigen::Index i = 0; i < hidden; ++i) b(i) = static_cast<Scalar>(bias(rng));
  }

  DenseMatrix<Scalar> p_aux = DenseMatrix<Scalar>::Identity(hidden, hidden) *
                              static_cast<Scalar>(1.0 / config.online_init_scale);
  return ElmState<Scalar>(std::move(w), std::move(b),
                          DenseMatrix<Scalar>::Zero(config.output_dim, hidden), std::move(p_aux),
                          config.activation);
}

template <typename Scalar>
Scalar activate(Activation kind, Scalar z) {
  using std::exp;
  using std::tanh;
  switch (kind) {
    case Activation::Tanh:
      return tanh(z);
    case Activation::Logistic:
    default:
      return Scalar(1) / (Scalar(1) + exp(-z));
  }
}

/// g(W x + b)
template <typename Scalar, typename Derived>
DenseVector<Scalar> hidden_activations(const ElmState<Scalar>& state,
                                       const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != state.input_dim())
    throw DimensionError("elm: input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(state.input_dim()));
  DenseVector<Scalar> z = state.input_weights() * x + state.bias();
  const auto kind = state.activation();
  return z.unaryExpr([kind](Scalar v) { return activate(kind, v); });
}

template <typename Scalar, typename Derived>
DenseVector<Scalar> predict_input(const ElmState<Scalar>& state,
                                  const Eigen::MatrixBase<Derived>& x) {
  return state.readout() * hidden_activations(state, x);
}

/// Raw linear readout beta * g(W [s; m] + b); not clipped to the pixel range.
template <typename Scalar, typename FrameDerived, typename MotorDerived>
DenseVector<Scalar> predict(const ElmState<Scalar>& state,
                            const Eigen::MatrixBase<FrameDerived>& frame,
                            const Eigen::MatrixBase<MotorDerived>& velocity) {
  if (frame.size() != state.output_dim() ||
      frame.size() + velocity.size() != state.input_dim())
    throw DimensionError("elm: frame/velocity lengths do not match the model");
  DenseVector<Scalar> x(state.input_dim());
  x << frame.template cast<Scalar>(), velocity.template cast<Scalar>();
  return predict_input(state, x);
}

template <typename Scalar>
DenseVector<Scalar> concat_input(const DenseVector<Scalar>& frame,
                                 const DenseVector<Scalar>& velocity) {
  DenseVector<Scalar> x(frame.size() + velocity.size());
  x << frame, velocity;
  return x;
}

/// Hidden-layer matrix with one column per sample.
template <typename Scalar>
DenseMatrix<Scalar> hidden_matrix(const ElmState<Scalar>& state,
                                  std::span<const TrainingPair<Scalar>> pairs) {
  DenseMatrix<Scalar> h(state.hidden_count(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t j = 0; j < pairs.size(); ++j)
    h.col(static_cast<Eigen::Index>(j)) = hidden_activations(state, pairs[j].x);
  return h;
}

/// Minimum-norm least-squares readout beta = Y H^+ over all pairs.
/// W, b and the online accumulator are carried over untouched.
template <typename Scalar>
ElmState<Scalar> fit_batch(const ElmState<Scalar>& state,
                           std::span<const TrainingPair<Scalar>> pairs) {
  if (pairs.empty()) throw UsageError("fit_batch: no training pairs");
  DenseMatrix<Scalar> y(state.output_dim(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    if (pairs[j].y.size() != state.output_dim())
      throw DimensionError("fit_batch: target length does not match output_dim");
    y.col(static_cast<Eigen::Index>(j)) = pairs[j].y;
  }
  const DenseMatrix<Scalar> h = hidden_matrix(state, pairs);
  if (!y.allFinite()) throw NumericError("fit_batch: non-finite targets");

  ElmState<Scalar> out = state;
  out.beta_ = y * pseudo_inverse(h);
  return out;
}

/// One recursive-least-squares step on the readout:
///   k = P h / (1 + h' P h),  beta += (y - beta h) k',  P -= k h' P.
/// Throws NumericError and leaves the state untouched if the step breaks down.
template <typename Scalar>
void update_online(ElmState<Scalar>& state, const DenseVector<Scalar>& x,
                   const DenseVector<Scalar>& y) {
  if (y.size() != state.output_dim())
    throw DimensionError("update_online: target length does not match output_dim");
  const DenseVector<Scalar> h = hidden_activations(state, x);
  const DenseVector<Scalar> ph = state.p_aux_ * h;
  const Scalar denom = Scalar(1) + h.dot(ph);
  if (!(denom > 0) || !std::isfinite(static_cast<double>(denom)))
    throw NumericError("update_online: non-positive gain denominator");

  const DenseVector<Scalar> gain = ph / denom;
  const DenseVector<Scalar> innovation = y - state.beta_ * h;
  DenseMatrix<Scalar> beta = state.beta_ + innovation * gain.transpose();
  // P symmetric, so h' P = (P h)'.
  DenseMatrix<Scalar> p = state.p_aux_ - gain * ph.transpose();
  p = (p + p.transpose()).eval() * Scalar(0.5);
  if (!beta.allFinite() || !p.allFinite())
    throw NumericError("update_online: update produced non-finite values");

  state.beta_ = std::move(beta);
  state.p_aux_ = std::move(p);
  ++state.samples_seen_;
}

template <typename Scalar>
void update_online(ElmState<Scalar>& state, const TrainingPair<Scalar>& pair) {
  update_online(state, pair.x, pair.y);
}

/// Mean-square error (1/p) * ||predicted - actual||^2.
template <typename DerivedA, typename DerivedB>
double prediction_error(const Eigen::MatrixBase<DerivedA>& predicted,
                        const Eigen::MatrixBase<DerivedB>& actual) {
  if (predicted.size() != actual.size())
    throw DimensionError("prediction_error: length mismatch");
  if (predicted.size() == 0) throw UsageError("prediction_error: empty vectors");
  const double sq = static_cast<double>((predicted - actual).squaredNorm());
  return sq / static_cast<double>(predicted.size());
}

}  // namespace sensorimotor
