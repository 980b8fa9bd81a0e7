#include "xylreg/mlfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xylreg/error.hpp"
#include "xylreg/rng.hpp"

namespace xylreg {

namespace {

void check_hidden(std::size_t hidden) {
  if (hidden == 0) {
    throw Error(ErrorCode::InvalidHiddenCount, "hidden layer needs at least 1 node");
  }
}

// Views into a flat parameter vector.
struct Layout {
  std::size_t h;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return h * kFeatureCount; }
  std::size_t w2() const { return b1() + h; }
  std::size_t b2() const { return w2() + h; }
  std::size_t size() const { return b2() + 1; }
};

struct StandardizedBatch {
  std::vector<FeatureVector> z;
  std::vector<double> y;
};

StandardizedBatch standardize_batch(const MlfnModel& m, std::span<const Example> batch) {
  StandardizedBatch out;
  out.z.reserve(batch.size());
  out.y.reserve(batch.size());
  for (const auto& e : batch) {
    out.z.push_back(m.standardizer().apply(e.x));
    out.y.push_back(m.target_scaler().scale(e.y));
  }
  return out;
}

// Loss and gradient over standardized data. `grad` must have layout.size()
// entries and is overwritten.
double loss_and_gradient(const Layout& lay, std::span<const double> theta,
                         const StandardizedBatch& data, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t h = lay.h;
  const double* w1 = theta.data() + lay.w1();
  const double* b1 = theta.data() + lay.b1();
  const double* w2 = theta.data() + lay.w2();
  const double b2 = theta[lay.b2()];
  double* g_w1 = grad.data() + lay.w1();
  double* g_b1 = grad.data() + lay.b1();
  double* g_w2 = grad.data() + lay.w2();

  const auto n = static_cast<double>(data.z.size());
  std::vector<double> act(h);
  double loss = 0.0;
  for (std::size_t i = 0; i < data.z.size(); ++i) {
    const auto& z = data.z[i];
    double out = b2;
    for (std::size_t k = 0; k < h; ++k) {
      double a = b1[k];
      const double* row = w1 + k * kFeatureCount;
      for (std::size_t j = 0; j < kFeatureCount; ++j) a += row[j] * z[j];
      act[k] = sigmoid(a);
      out += w2[k] * act[k];
    }
    const double r = out - data.y[i];
    loss += r * r;
    const double d = 2.0 * r / n;
    grad[lay.b2()] += d;
    for (std::size_t k = 0; k < h; ++k) {
      g_w2[k] += d * act[k];
      const double delta = d * w2[k] * act[k] * (1.0 - act[k]);
      g_b1[k] += delta;
      double* g_row = g_w1 + k * kFeatureCount;
      for (std::size_t j = 0; j < kFeatureCount; ++j) g_row[j] += delta * z[j];
    }
  }
  return loss / n;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

MlfnModel::MlfnModel(std::size_t hidden, std::vector<double> w1, std::vector<double> b1,
                     std::vector<double> w2, double b2, Standardizer standardizer,
                     TargetScaler target_scaler)
    : hidden_(hidden),
      w1_(std::move(w1)),
      b1_(std::move(b1)),
      w2_(std::move(w2)),
      b2_(b2),
      standardizer_(std::move(standardizer)),
      target_scaler_(target_scaler) {
  check_hidden(hidden_);
  if (w1_.size() != hidden_ * kFeatureCount || b1_.size() != hidden_ ||
      w2_.size() != hidden_) {
    throw Error(ErrorCode::ArityMismatch, "MLFN parameter shapes do not match h = " +
                                              std::to_string(hidden_));
  }
  if (!all_finite(w1_) || !all_finite(b1_) || !all_finite(w2_) ||
      !std::isfinite(b2_)) {
    throw Error(ErrorCode::InvalidConfig, "MLFN parameters must be finite");
  }
  if (!std::isfinite(target_scaler_.mean) || !(target_scaler_.stddev > 0.0) ||
      !std::isfinite(target_scaler_.stddev)) {
    throw Error(ErrorCode::InvalidConfig, "target scaler needs a positive stddev");
  }
}

std::vector<double> MlfnModel::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  flat.insert(flat.end(), w1_.begin(), w1_.end());
  flat.insert(flat.end(), b1_.begin(), b1_.end());
  flat.insert(flat.end(), w2_.begin(), w2_.end());
  flat.push_back(b2_);
  return flat;
}

MlfnModel MlfnModel::with_parameters(std::span<const double> flat) const {
  const Layout lay{hidden_};
  if (flat.size() != lay.size()) {
    throw Error(ErrorCode::ArityMismatch,
                "expected " + std::to_string(lay.size()) + " parameters, got " +
                    std::to_string(flat.size()));
  }
  const auto at = [&](std::size_t from, std::size_t to) {
    return std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(from),
                               flat.begin() + static_cast<std::ptrdiff_t>(to));
  };
  return MlfnModel(hidden_, at(lay.w1(), lay.b1()), at(lay.b1(), lay.w2()),
                   at(lay.w2(), lay.b2()), flat[lay.b2()], standardizer_,
                   target_scaler_);
}

MlfnModel MlfnModel::with_scalers(Standardizer standardizer,
                                  TargetScaler target_scaler) const {
  return MlfnModel(hidden_, w1_, b1_, w2_, b2_, std::move(standardizer), target_scaler);
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "momentum must be in [0, 1)");
  }
  if (max_epochs < 1 || patience < 1) {
    throw Error(ErrorCode::InvalidConfig, "max_epochs and patience must be >= 1");
  }
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
    throw Error(ErrorCode::InvalidConfig, "init_scale must be positive");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::EarlyStop: return "early_stop";
    case StopReason::Diverged: return "diverged";
  }
  return "unknown";
}

std::vector<double> Gradients::flat() const {
  std::vector<double> out;
  out.reserve(w1.size() + b1.size() + w2.size() + 1);
  out.insert(out.end(), w1.begin(), w1.end());
  out.insert(out.end(), b1.begin(), b1.end());
  out.insert(out.end(), w2.begin(), w2.end());
  out.push_back(b2);
  return out;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

MlfnModel init_weights(std::size_t hidden, std::uint64_t seed, double init_scale) {
  check_hidden(hidden);
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
    throw Error(ErrorCode::InvalidConfig, "init_scale must be positive");
  }
  Rng rng(seed);
  const auto draw = [&](std::size_t count) {
    std::vector<double> v(count);
    for (auto& x : v) x = rng.uniform(-init_scale, init_scale);
    return v;
  };
  auto w1 = draw(hidden * kFeatureCount);
  auto b1 = draw(hidden);
  auto w2 = draw(hidden);
  const double b2 = rng.uniform(-init_scale, init_scale);
  return MlfnModel(hidden, std::move(w1), std::move(b1), std::move(w2), b2);
}

double forward(const MlfnModel& m, std::span<const double> x) {
  const auto z = standardize(m.standardizer(), x);
  double out = m.b2();
  for (std::size_t k = 0; k < m.hidden_count(); ++k) {
    double a = m.b1()[k];
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      a += m.w1()[k * kFeatureCount + j] * z[j];
    }
    out += m.w2()[k] * sigmoid(a);
  }
  return m.target_scaler().unscale(out);
}

double mse_loss(const MlfnModel& m, std::span<const Example> batch) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "loss over an empty batch");
  double sum = 0.0;
  for (const auto& e : batch) {
    const double r = m.target_scaler().scale(forward(m, e.x)) -
                     m.target_scaler().scale(e.y);
    sum += r * r;
  }
  return sum / static_cast<double>(batch.size());
}

Gradients backprop_gradients(const MlfnModel& m, std::span<const Example> batch) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "gradient of an empty batch");
  const Layout lay{m.hidden_count()};
  const auto theta = m.parameters();
  std::vector<double> grad(lay.size());
  loss_and_gradient(lay, theta, standardize_batch(m, batch), grad);

  Gradients g;
  g.w1.assign(grad.begin(), grad.begin() + static_cast<std::ptrdiff_t>(lay.b1()));
  g.b1.assign(grad.begin() + static_cast<std::ptrdiff_t>(lay.b1()),
              grad.begin() + static_cast<std::ptrdiff_t>(lay.w2()));
  g.w2.assign(grad.begin() + static_cast<std::ptrdiff_t>(lay.w2()),
              grad.begin() + static_cast<std::ptrdiff_t>(lay.b2()));
  g.b2 = grad[lay.b2()];
  return g;
}

std::vector<Example> examples(const Dataset& ds, TargetKind target) {
  const auto y = ds.target_values(target);
  std::vector<Example> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back({ds[i].features, y[i]});
  return out;
}

TrainResult train_mlfn(const Dataset& train, TargetKind target, std::size_t hidden,
                       const TrainConfig& cfg) {
  check_hidden(hidden);
  cfg.validate();
  if (train.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "MLFN training needs at least 2 rows");
  }

  auto rows = examples(train, target);
  std::sort(rows.begin(), rows.end(), [](const Example& a, const Example& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });

  std::vector<FeatureVector> xs;
  xs.reserve(rows.size());
  for (const auto& e : rows) xs.push_back(e.x);
  const auto standardizer = fit_standardizer(std::span<const FeatureVector>(xs));

  const auto n = static_cast<double>(rows.size());
  double y_mean = 0.0;
  for (const auto& e : rows) y_mean += e.y;
  y_mean /= n;
  double y_ss = 0.0;
  for (const auto& e : rows) y_ss += (e.y - y_mean) * (e.y - y_mean);
  const double y_sd = std::sqrt(y_ss / n);
  const TargetScaler target_scaler{y_mean, y_sd < kDegenerateStddev ? 1.0 : y_sd};

  const auto init = init_weights(hidden, cfg.seed, cfg.init_scale)
                        .with_scalers(standardizer, target_scaler);
  const auto data = standardize_batch(init, rows);

  const Layout lay{hidden};
  auto theta = init.parameters();
  auto last_finite = theta;
  std::vector<double> velocity(lay.size(), 0.0);
  std::vector<double> grad(lay.size());

  TrainHistory history;
  history.stop = StopReason::MaxEpochs;
  history.train_mse.reserve(std::min<std::size_t>(cfg.max_epochs, 1 << 16));
  double best = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double loss = loss_and_gradient(lay, theta, data, grad);
    if (!std::isfinite(loss) || !all_finite(grad)) {
      theta = last_finite;
      history.stop = StopReason::Diverged;
      break;
    }
    last_finite = theta;
    if (loss > kDivergenceLoss) {
      history.stop = StopReason::Diverged;
      break;
    }
    history.train_mse.push_back(loss);
    if (loss <= best - kMinImprovement) {
      best = loss;
      stalled = 0;
    } else if (++stalled >= cfg.patience) {
      history.stop = StopReason::EarlyStop;
      break;
    }
    for (std::size_t p = 0; p < theta.size(); ++p) {
      velocity[p] = cfg.momentum * velocity[p] - cfg.learning_rate * grad[p];
      theta[p] += velocity[p];
    }
    if (!all_finite(theta)) {
      theta = last_finite;
      history.stop = StopReason::Diverged;
      break;
    }
  }

  return TrainResult{init.with_parameters(theta), std::move(history)};
}

}  // namespace xylreg
