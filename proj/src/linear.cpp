#include "xylreg/linear.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "xylreg/error.hpp"

namespace xylreg {

namespace {

using Matrix = std::array<std::array<double, kFeatureCount>, kFeatureCount>;

// Relative pivot threshold below which the Gram matrix is treated as singular.
constexpr double kPivotTolerance = 1e-10;

// Cholesky solve of a symmetric system; nullopt when a pivot collapses.
std::optional<FeatureVector> cholesky_solve(Matrix a, FeatureVector b) {
  double scale = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) scale = std::max(scale, a[i][i]);
  if (!(scale > 0.0)) return std::nullopt;

  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
    if (!(d > kPivotTolerance * scale)) return std::nullopt;
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < kFeatureCount; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      a[i][j] = s / a[j][j];
    }
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
    b[i] = s / a[i][i];
  }
  for (std::size_t i = kFeatureCount; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < kFeatureCount; ++k) s -= a[k][i] * b[k];
    b[i] = s / a[i][i];
  }
  return b;
}

}  // namespace

FeatureVector LinearModel::raw_slopes() const {
  FeatureVector slopes{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    slopes[j] = weights[j] / standardizer.stddevs()[j];
  }
  return slopes;
}

double LinearModel::raw_intercept() const {
  const auto slopes = raw_slopes();
  double b = intercept;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    b -= slopes[j] * standardizer.means()[j];
  }
  return b;
}

LinearModel fit_ols(std::span<const FeatureVector> x, std::span<const double> y,
                    double ridge) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature and target counts differ");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "linear fit needs at least 2 rows");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::InvalidConfig, "ridge must be finite and >= 0");
  }

  LinearModel m;
  m.standardizer = fit_standardizer(x);
  const auto n = static_cast<double>(x.size());

  std::vector<FeatureVector> z;
  z.reserve(x.size());
  for (const auto& row : x) z.push_back(m.standardizer.apply(row));

  // Center explicitly so the intercept stays out of the penalty.
  FeatureVector z_mean{};
  double y_mean = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) z_mean[j] += z[i][j];
    y_mean += y[i];
  }
  for (auto& v : z_mean) v /= n;
  y_mean /= n;

  Matrix gram{};
  FeatureVector rhs{};
  for (std::size_t i = 0; i < z.size(); ++i) {
    FeatureVector c{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) c[j] = z[i][j] - z_mean[j];
    const double yc = y[i] - y_mean;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      rhs[j] += c[j] * yc;
      for (std::size_t k = 0; k <= j; ++k) gram[j][k] += c[j] * c[k];
    }
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    for (std::size_t k = j + 1; k < kFeatureCount; ++k) gram[j][k] = gram[k][j];
  }

  auto solve_with = [&](double lambda) {
    Matrix a = gram;
    for (std::size_t j = 0; j < kFeatureCount; ++j) a[j][j] += lambda;
    return cholesky_solve(a, rhs);
  };

  auto w = solve_with(ridge);
  m.ridge = ridge;
  if (!w && ridge == 0.0) {
    w = solve_with(kRidgeFallback);
    m.ridge = kRidgeFallback;
    m.ridge_fallback = true;
  }
  if (!w) {
    throw Error(ErrorCode::SingularSystem,
                "normal equations are singular at ridge " + format_real(m.ridge));
  }

  m.weights = *w;
  m.intercept = y_mean;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    m.intercept -= m.weights[j] * z_mean[j];
  }
  return m;
}

LinearModel fit_ols(const Dataset& train, TargetKind target, double ridge) {
  const auto x = train.features();
  const auto y = train.target_values(target);
  return fit_ols(std::span<const FeatureVector>(x), std::span<const double>(y),
                 ridge);
}

double predict_linear(const LinearModel& m, std::span<const double> x) {
  const auto z = standardize(m.standardizer, x);
  double out = m.intercept;
  for (std::size_t j = 0; j < kFeatureCount; ++j) out += m.weights[j] * z[j];
  return out;
}

}  // namespace xylreg
