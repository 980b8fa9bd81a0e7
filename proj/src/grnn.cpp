#include "xylreg/grnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xylreg/error.hpp"

namespace xylreg {

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    const double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::NonPositiveSigma,
                "sigma must be positive and finite, got " + format_real(sigma));
  }
}

Standardizer grnn_standardizer(const std::vector<FeatureVector>& rows) {
  if (rows.size() == 1) return Standardizer(rows.front(), FeatureVector{1, 1, 1, 1, 1, 1, 1, 1, 1});
  return fit_standardizer(std::span<const FeatureVector>(rows));
}

}  // namespace

GrnnModel::GrnnModel(std::vector<FeatureVector> patterns, std::vector<double> targets,
                     double sigma, Standardizer standardizer)
    : patterns_(std::move(patterns)),
      targets_(std::move(targets)),
      sigma_(sigma),
      standardizer_(std::move(standardizer)) {
  if (patterns_.empty()) {
    throw Error(ErrorCode::EmptyTrainSet, "GRNN needs at least one pattern");
  }
  if (patterns_.size() != targets_.size()) {
    throw Error(ErrorCode::LengthMismatch, "GRNN pattern and target counts differ");
  }
  check_sigma(sigma_);
}

const std::vector<double>& default_bandwidths() {
  static const std::vector<double> grid = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
  return grid;
}

GrnnModel fit_grnn(const Dataset& train, TargetKind target, double sigma) {
  check_sigma(sigma);
  auto rows = train.features();
  auto standardizer = grnn_standardizer(rows);
  for (auto& r : rows) r = standardizer.apply(r);
  return GrnnModel(std::move(rows), train.target_values(target), sigma,
                   std::move(standardizer));
}

double kernel_average(std::span<const FeatureVector> patterns,
                      std::span<const double> targets, double sigma,
                      const FeatureVector& z, std::ptrdiff_t skip) {
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> exponents(patterns.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    exponents[i] = -squared_distance(z, patterns[i]) * inv_two_var;
    top = std::max(top, exponents[i]);
  }
  // Averaging offsets from one stored target keeps constant targets exact.
  const std::size_t ref = skip == 0 ? 1 : 0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    const double w = std::exp(exponents[i] - top);
    num += w * (targets[i] - targets[ref]);
    den += w;
  }
  return targets[ref] + num / den;
}

double predict_grnn(const GrnnModel& m, std::span<const double> x) {
  const auto z = standardize(m.standardizer(), x);
  return kernel_average(m.patterns(), m.targets(), m.sigma(), z);
}

double leave_one_out_rms(const Dataset& train, TargetKind target, double sigma) {
  check_sigma(sigma);
  if (train.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "leave-one-out needs at least 2 rows");
  }
  const auto model = fit_grnn(train, target, sigma);
  const auto& p = model.patterns();
  const auto& y = model.targets();
  double ss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r =
        kernel_average(p, y, sigma, p[i], static_cast<std::ptrdiff_t>(i)) - y[i];
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(p.size()));
}

double select_bandwidth(const Dataset& train, TargetKind target,
                        std::span<const double> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::EmptyCandidates, "no bandwidth candidates given");
  }
  if (train.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "bandwidth selection needs at least 2 rows");
  }
  std::vector<double> sorted(candidates.begin(), candidates.end());
  for (const double s : sorted) check_sigma(s);
  std::sort(sorted.begin(), sorted.end());

  double best_sigma = sorted.front();
  double best_rms = std::numeric_limits<double>::infinity();
  for (const double s : sorted) {
    const double rms = leave_one_out_rms(train, target, s);
    if (rms < best_rms) {
      best_rms = rms;
      best_sigma = s;
    }
  }
  return best_sigma;
}

}  // namespace xylreg
