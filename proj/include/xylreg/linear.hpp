#pragma once

#include <span>

#include "xylreg/dataset.hpp"

namespace xylreg {

/// Ridge used when the unregularized normal equations are singular.
inline constexpr double kRidgeFallback = 1e-8;

/// Affine model on standardized features: y = w . standardize(x) + b.
struct LinearModel {
  FeatureVector weights{};
  double intercept = 0.0;
  Standardizer standardizer;
  /// Ridge actually applied to the solve.
  double ridge = 0.0;
  /// Set when a ridge-0 fit was singular and was retried with kRidgeFallback.
  bool ridge_fallback = false;

  /// Slopes per raw feature unit.
  FeatureVector raw_slopes() const;
  /// Intercept in raw feature units.
  double raw_intercept() const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Minimizes sum (y - w.z - b)^2 + ridge |w|^2 over standardized features z.
/// The intercept is not penalized. Throws TooFewRows, InvalidConfig for a
/// negative ridge, and SingularSystem when even the fallback solve fails.
LinearModel fit_ols(const Dataset& train, TargetKind target, double ridge = 0.0);
LinearModel fit_ols(std::span<const FeatureVector> x, std::span<const double> y,
                    double ridge = 0.0);

double predict_linear(const LinearModel& m, std::span<const double> x);

}  // namespace xylreg
