#pragma once

#include <span>
#include <vector>

#include "xylreg/dataset.hpp"

namespace xylreg {

/// General regression neural network: a Gaussian-kernel weighted average of
/// stored targets,
///   y(x) = sum_i y_i exp(-D_i^2 / (2 sigma^2)) / sum_i exp(-D_i^2 / (2 sigma^2))
/// with D_i the Euclidean distance between standardized x and pattern i.
class GrnnModel {
 public:
  /// Throws EmptyTrainSet, LengthMismatch or NonPositiveSigma.
  GrnnModel(std::vector<FeatureVector> patterns, std::vector<double> targets,
            double sigma, Standardizer standardizer);

  /// Standardized training patterns.
  const std::vector<FeatureVector>& patterns() const { return patterns_; }
  const std::vector<double>& targets() const { return targets_; }
  double sigma() const { return sigma_; }
  const Standardizer& standardizer() const { return standardizer_; }

  friend bool operator==(const GrnnModel&, const GrnnModel&) = default;

 private:
  std::vector<FeatureVector> patterns_;
  std::vector<double> targets_;
  double sigma_;
  Standardizer standardizer_;
};

/// {0.05, 0.1, 0.2, 0.5, 1, 2, 5} in standardized units.
const std::vector<double>& default_bandwidths();

/// Stores the standardized training rows. A single-row set is centered on
/// that row with unit scales.
GrnnModel fit_grnn(const Dataset& train, TargetKind target, double sigma);

double predict_grnn(const GrnnModel& m, std::span<const double> x);

/// Kernel average over already-standardized patterns, optionally leaving one
/// pattern out. The largest exponent is subtracted before exponentiation, so
/// a query far from every pattern gets the nearest pattern's target.
double kernel_average(std::span<const FeatureVector> patterns,
                      std::span<const double> targets, double sigma,
                      const FeatureVector& z,
                      std::ptrdiff_t skip = -1);

/// Leave-one-out RMS of the GRNN on its own training set.
double leave_one_out_rms(const Dataset& train, TargetKind target, double sigma);

/// The candidate with the smallest leave-one-out RMS; ties go to the smaller
/// sigma. Throws EmptyCandidates, NonPositiveSigma or TooFewRows.
double select_bandwidth(const Dataset& train, TargetKind target,
                        std::span<const double> candidates);

}  // namespace xylreg
