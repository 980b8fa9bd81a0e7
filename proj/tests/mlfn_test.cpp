#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xylreg/error.hpp"
#include "xylreg/linear.hpp"
#include "xylreg/mlfn.hpp"

namespace xylreg {
namespace {

constexpr auto kIbp = TargetKind::InitialBoilingPoint;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

bool gradients_agree(const std::vector<double>& analytic, const std::vector<double>& numeric,
                     double rel, double abs_floor, std::string* detail = nullptr) {
  for (std::size_t p = 0; p < analytic.size(); ++p) {
    const double scale = std::max(std::fabs(analytic[p]), std::fabs(numeric[p]));
    if (std::fabs(analytic[p] - numeric[p]) > std::max(rel * scale, abs_floor)) {
      if (detail) {
        *detail = "param " + std::to_string(p) + ": analytic " + std::to_string(analytic[p]) +
                  " numeric " + std::to_string(numeric[p]);
      }
      return false;
    }
  }
  return true;
}

TEST(InitWeights, ParameterCounts) {
  EXPECT_EQ(init_weights(7, 1, 0.5).parameters().size(), 78u);
  EXPECT_EQ(init_weights(4, 1, 0.5).parameters().size(), 45u);
  for (std::size_t h = 1; h <= 30; ++h) {
    const auto m = init_weights(h, h, 0.5);
    EXPECT_EQ(m.parameter_count(), 11 * h + 1);
    EXPECT_EQ(m.parameters().size(), 11 * h + 1);
  }
}

TEST(InitWeights, DeterministicAndBounded) {
  EXPECT_EQ(init_weights(7, 99, 0.5).parameters(), init_weights(7, 99, 0.5).parameters());
  EXPECT_NE(init_weights(7, 99, 0.5).parameters(), init_weights(7, 100, 0.5).parameters());
  for (const double v : init_weights(30, 5, 0.25).parameters()) {
    EXPECT_LE(std::fabs(v), 0.25);
  }
}

TEST(InitWeights, RejectsZeroHidden) {
  EXPECT_EQ(code_of([] { init_weights(0, 1, 0.5); }), ErrorCode::InvalidHiddenCount);
}

TEST(Forward, ConstantHead) {
  auto m = init_weights(5, 3, 0.5);
  auto theta = m.parameters();
  std::fill(theta.end() - 6, theta.end(), 0.0);  // w2 and b2
  m = m.with_parameters(theta).with_scalers(Standardizer{}, TargetScaler{140.0, 1.0});
  std::mt19937_64 gen(2);
  for (int i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(forward(m, oracle::random_features(gen)), 140.0);
}

TEST(Forward, SigmoidAtZero) {
  const MlfnModel m(1, std::vector<double>(9, 0.0), {0.0}, {2.0}, 0.0);
  EXPECT_DOUBLE_EQ(forward(m, std::vector<double>(9, 3.0)), 1.0);
}

TEST(Forward, MatchesExtendedPrecisionOracle) {
  std::mt19937_64 gen(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_mlfn(3, gen);
    const auto x = oracle::random_features(gen);
    EXPECT_NEAR(forward(m, x), static_cast<double>(oracle::mlfn_forward(m, x)), 1e-12);
  }
}

TEST(Forward, ArityMismatch) {
  EXPECT_EQ(code_of([] { forward(init_weights(2, 1, 0.5), std::vector<double>(8, 0.0)); }),
            ErrorCode::ArityMismatch);
}

TEST(MseLoss, PerfectPredictionsAreZero) {
  std::mt19937_64 gen(59);
  const auto m = oracle::random_mlfn(4, gen);
  auto batch = oracle::random_batch(6, gen);
  for (auto& e : batch) e.y = forward(m, e.x);
  EXPECT_EQ(mse_loss(m, batch), 0.0);
}

TEST(MseLoss, SquaredStandardizedResidual) {
  const MlfnModel m(1, std::vector<double>(9, 0.0), {0.0}, {0.0}, 0.0, Standardizer{},
                    TargetScaler{140.0, 0.5});
  const std::vector<Example> batch = {{FeatureVector{}, 139.0}};  // (140 - 139) / 0.5 = 2
  EXPECT_DOUBLE_EQ(mse_loss(m, batch), 4.0);
}

TEST(MseLoss, MatchesIndependentSummation) {
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = oracle::random_mlfn(1 + gen() % 8, gen);
    const auto batch = oracle::random_batch(1 + gen() % 14, gen);
    long double sum = 0.0L;
    for (const auto& e : batch) {
      const long double r = (oracle::mlfn_forward(m, e.x) - e.y) / m.target_scaler().stddev;
      sum += r * r;
    }
    const long double expected = sum / static_cast<long double>(batch.size());
    EXPECT_NEAR(mse_loss(m, batch), static_cast<double>(expected),
                1e-12 * std::max(1.0L, expected));
  }
}

TEST(MseLoss, EmptyBatch) {
  EXPECT_EQ(code_of([] { mse_loss(init_weights(2, 1, 0.5), {}); }), ErrorCode::EmptyBatch);
  EXPECT_EQ(code_of([] { backprop_gradients(init_weights(2, 1, 0.5), {}); }),
            ErrorCode::EmptyBatch);
}

TEST(Backprop, ZeroOutputWeightsKillHiddenGradients) {
  std::mt19937_64 gen(67);
  auto m = oracle::random_mlfn(5, gen);
  auto theta = m.parameters();
  std::fill(theta.end() - 6, theta.end() - 1, 0.0);  // w2
  m = m.with_parameters(theta);
  const auto g = backprop_gradients(m, oracle::random_batch(7, gen));
  for (const double v : g.w1) EXPECT_EQ(v, 0.0);
  for (const double v : g.b1) EXPECT_EQ(v, 0.0);
}

TEST(Backprop, MatchesCentralDifferences) {
  std::mt19937_64 gen(71);
  int instances = 0;
  for (const std::size_t h : {1u, 2u, 4u, 7u}) {
    for (int trial = 0; trial < 30; ++trial, ++instances) {
      const auto m = oracle::random_mlfn(h, gen);
      const auto batch = oracle::random_batch(1 + gen() % 14, gen);
      const auto analytic = backprop_gradients(m, batch).flat();
      const auto numeric = oracle::fd_gradient(m, batch, 1e-5);
      std::string detail;
      EXPECT_TRUE(gradients_agree(analytic, numeric, 1e-6, 1e-8, &detail))
          << "h=" << h << " trial " << trial << ": " << detail;
    }
  }
  EXPECT_GE(instances, 100);
}

TEST(Backprop, DuplicatedBatchGivesSameGradient) {
  std::mt19937_64 gen(73);
  const auto m = oracle::random_mlfn(4, gen);
  const auto batch = oracle::random_batch(5, gen);
  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  const auto a = backprop_gradients(m, batch).flat();
  const auto b = backprop_gradients(m, doubled).flat();
  for (std::size_t p = 0; p < a.size(); ++p) {
    EXPECT_NEAR(a[p], b[p], 1e-12 * std::max(1.0, std::fabs(a[p])));
  }
}

TEST(Backprop, PermutationInvariant) {
  std::mt19937_64 gen(79);
  const auto m = oracle::random_mlfn(6, gen);
  auto batch = oracle::random_batch(14, gen);
  const auto a = backprop_gradients(m, batch).flat();
  std::shuffle(batch.begin(), batch.end(), gen);
  const auto b = backprop_gradients(m, batch).flat();
  for (std::size_t p = 0; p < a.size(); ++p) {
    EXPECT_NEAR(a[p], b[p], 1e-12 * std::max(1.0, std::fabs(a[p])));
  }
}

TEST(TrainMlfn, LearnsAConstantTarget) {
  const auto base = generate_synthetic(14, 4);
  std::vector<Sample> rows = base.samples();
  for (auto& s : rows) s.targets = {{kIbp, 137.25}};
  const Dataset train(rows, {kIbp});
  TrainConfig cfg;
  cfg.seed = 5;
  const auto [model, history] = train_mlfn(train, kIbp, 3, cfg);
  std::vector<double> pred;
  for (const auto& s : train.samples()) pred.push_back(forward(model, s.features));
  EXPECT_LT(static_cast<double>(oracle::rms(pred, train.target_values(kIbp))), 1e-3);
  EXPECT_NE(history.stop, StopReason::Diverged);
}

TEST(TrainMlfn, BeatsLinearFitOnNonlinearTarget) {
  const auto s = split(generate_synthetic(22, 1), 14, 0);
  for (const auto target : kAllTargets) {
    const auto lm = fit_ols(s.train, target);
    TrainConfig cfg;
    cfg.seed = 11;
    const auto [model, history] = train_mlfn(s.train, target, 7, cfg);
    long double lin = 0.0L;
    long double net = 0.0L;
    const double sd = model.target_scaler().stddev;
    for (const auto& row : s.train.samples()) {
      const double y = row.target(target);
      lin += std::pow((predict_linear(lm, row.features) - y) / sd, 2);
      net += std::pow((forward(model, row.features) - y) / sd, 2);
    }
    EXPECT_LT(net, lin) << short_name(target);
  }
}

TEST(TrainMlfn, DeterministicAndOrderFree) {
  const auto ds = generate_synthetic(14, 6);
  TrainConfig cfg;
  cfg.seed = 3;
  cfg.max_epochs = 3000;
  const auto a = train_mlfn(ds, kIbp, 5, cfg);
  const auto b = train_mlfn(ds, kIbp, 5, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.model, b.model);

  std::vector<std::size_t> reversed(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) reversed[i] = ds.size() - 1 - i;
  const auto c = train_mlfn(ds.subset(reversed), kIbp, 5, cfg);
  EXPECT_EQ(a.history, c.history);
  EXPECT_EQ(a.model, c.model);
}

TEST(TrainMlfn, SmallStepsDescendMonotonically) {
  std::mt19937_64 gen(83);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FeatureVector> x(14);
    for (auto& r : x) r = oracle::random_features(gen);
    std::uniform_real_distribution<double> noise(-1, 1);
    const auto ds = oracle::make_dataset(x, [&](const FeatureVector& f) {
      return 140.0 + std::sin(f[0]) + f[1] * f[2] + noise(gen);
    });
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.momentum = 0.0;
    cfg.max_epochs = 10;
    cfg.seed = gen();
    const auto [model, history] = train_mlfn(ds, kIbp, 1 + gen() % 7, cfg);
    ASSERT_EQ(history.train_mse.size(), 10u);
    for (std::size_t e = 1; e < history.train_mse.size(); ++e) {
      EXPECT_LE(history.train_mse[e], history.train_mse[e - 1]);
    }
  }
}

TEST(TrainMlfn, DivergenceIsReportedNotThrown) {
  const auto ds = generate_synthetic(14, 8);
  TrainConfig cfg;
  cfg.learning_rate = 50.0;
  cfg.seed = 1;
  const auto [model, history] = train_mlfn(ds, kIbp, 11, cfg);
  EXPECT_EQ(history.stop, StopReason::Diverged);
  for (const double p : model.parameters()) EXPECT_TRUE(std::isfinite(p));
  EXPECT_TRUE(std::isfinite(forward(model, ds[0].features)));
  EXPECT_LE(history.train_mse.size(), cfg.max_epochs);
}

TEST(TrainMlfn, EarlyStopAndEpochCap) {
  const auto ds = generate_synthetic(14, 9);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  auto capped = train_mlfn(ds, kIbp, 2, cfg);
  EXPECT_EQ(capped.history.stop, StopReason::MaxEpochs);
  EXPECT_EQ(capped.history.train_mse.size(), 50u);

  cfg.max_epochs = 20000;
  cfg.patience = 1;
  cfg.learning_rate = 1e-12;
  auto stalled = train_mlfn(ds, kIbp, 2, cfg);
  EXPECT_EQ(stalled.history.stop, StopReason::EarlyStop);
  EXPECT_EQ(stalled.history.train_mse.size(), 2u);
}

TEST(TrainMlfn, Preconditions) {
  const auto ds = generate_synthetic(14, 9);
  TrainConfig cfg;
  EXPECT_EQ(code_of([&] { train_mlfn(ds, kIbp, 0, cfg); }), ErrorCode::InvalidHiddenCount);
  EXPECT_EQ(code_of([&] { train_mlfn(ds.subset(std::vector<std::size_t>{0}), kIbp, 2, cfg); }),
            ErrorCode::TooFewRows);
  cfg.momentum = 1.0;
  EXPECT_EQ(code_of([&] { train_mlfn(ds, kIbp, 2, cfg); }), ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace xylreg
