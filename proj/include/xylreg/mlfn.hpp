#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xylreg/dataset.hpp"

namespace xylreg {

/// Affine map between raw target units (degC) and the standardized units the
/// network is trained in.
struct TargetScaler {
  double mean = 0.0;
  double stddev = 1.0;

  double scale(double y) const { return (y - mean) / stddev; }
  double unscale(double z) const { return z * stddev + mean; }

  friend bool operator==(const TargetScaler&, const TargetScaler&) = default;
};

/// Single-hidden-layer network, 9 -> h -> 1, sigmoid hidden units and a
/// linear output:
///   y_std = w2 . sigmoid(W1 z + b1) + b2,  z = standardize(x)
/// and the prediction is target_scaler.unscale(y_std).
///
/// The flat parameter layout is [W1 (row-major, h x 9), b1 (h), w2 (h), b2],
/// 11h + 1 values.
class MlfnModel {
 public:
  MlfnModel(std::size_t hidden, std::vector<double> w1, std::vector<double> b1,
            std::vector<double> w2, double b2, Standardizer standardizer = {},
            TargetScaler target_scaler = {});

  std::size_t hidden_count() const { return hidden_; }
  std::size_t parameter_count() const { return 11 * hidden_ + 1; }
  const std::vector<double>& w1() const { return w1_; }
  const std::vector<double>& b1() const { return b1_; }
  const std::vector<double>& w2() const { return w2_; }
  double b2() const { return b2_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const TargetScaler& target_scaler() const { return target_scaler_; }

  std::vector<double> parameters() const;
  /// Same scalers, new parameters. Throws ArityMismatch on a wrong length.
  MlfnModel with_parameters(std::span<const double> flat) const;
  MlfnModel with_scalers(Standardizer standardizer, TargetScaler target_scaler) const;

  friend bool operator==(const MlfnModel&, const MlfnModel&) = default;

 private:
  std::size_t hidden_;
  std::vector<double> w1_;
  std::vector<double> b1_;
  std::vector<double> w2_;
  double b2_;
  Standardizer standardizer_;
  TargetScaler target_scaler_;
};

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t max_epochs = 20000;
  /// Epochs without a train-MSE improvement of at least kMinImprovement.
  std::size_t patience = 500;
  std::uint64_t seed = 0;
  double init_scale = 0.5;

  /// Throws InvalidConfig.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline constexpr double kMinImprovement = 1e-10;
inline constexpr double kDivergenceLoss = 1e6;

enum class StopReason { MaxEpochs, EarlyStop, Diverged };

std::string_view to_string(StopReason reason);

struct TrainHistory {
  /// Full-batch train MSE in standardized target units, one entry per epoch,
  /// measured before that epoch's update.
  std::vector<double> train_mse;
  StopReason stop = StopReason::MaxEpochs;

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

/// One training pair in raw units.
struct Example {
  FeatureVector x{};
  double y = 0.0;
};

/// Gradients of mse_loss, laid out like MlfnModel::parameters().
struct Gradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  std::vector<double> flat() const;
};

double sigmoid(double t);

/// Weights and biases uniform on [-init_scale, init_scale]; identity scalers.
/// Throws InvalidHiddenCount when hidden == 0.
MlfnModel init_weights(std::size_t hidden, std::uint64_t seed, double init_scale);

double forward(const MlfnModel& m, std::span<const double> x);

/// Mean of (y_std_hat - y_std)^2 over the batch. Throws EmptyBatch.
double mse_loss(const MlfnModel& m, std::span<const Example> batch);

/// Exact gradients of mse_loss. Throws EmptyBatch.
Gradients backprop_gradients(const MlfnModel& m, std::span<const Example> batch);

std::vector<Example> examples(const Dataset& ds, TargetKind target);

struct TrainResult {
  MlfnModel model;
  TrainHistory history;
};

/// Full-batch gradient descent with momentum on standardized inputs and
/// targets. Rows are put in a canonical order first, so the result does not
/// depend on the order of the training set. Training stops after max_epochs,
/// after `patience` epochs without improvement, or when the loss exceeds
/// kDivergenceLoss or stops being finite. In the last case the most recent
/// parameters with a finite loss are returned.
TrainResult train_mlfn(const Dataset& train, TargetKind target, std::size_t hidden,
                       const TrainConfig& cfg);

}  // namespace xylreg
