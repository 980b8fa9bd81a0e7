// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "xylreg/archive.hpp"
#include "xylreg/cli.hpp"
#include "xylreg/sweep.hpp"

namespace fs = std::filesystem;
using namespace xylreg;

namespace {

struct Check {
  bool ok = true;
  std::string why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      why = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "xylreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

Check gradient_oracle() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2024);
  int instances = 0;
  for (const std::size_t h : {1u, 2u, 4u, 7u}) {
    for (int trial = 0; trial < 30; ++trial, ++instances) {
      const auto m = oracle::random_mlfn(h, gen);
      const auto batch = oracle::random_batch(1 + gen() % 14, gen);
      const auto analytic = backprop_gradients(m, batch).flat();
      const auto numeric = oracle::fd_gradient(m, batch, 1e-5);
      for (std::size_t p = 0; p < analytic.size(); ++p) {
        const double scale = std::max(std::fabs(analytic[p]), std::fabs(numeric[p]));
        const double diff = std::fabs(analytic[p] - numeric[p]);
        c.expect(diff <= std::max(1e-6 * scale, 1e-8),
                 "h=" + std::to_string(h) + " param " + std::to_string(p) + " differs by " +
                     std::to_string(diff));
      }
    }
  }
  c.expect(instances >= 100, "too few instances");
  const double dt = seconds_since(t0);
  c.expect(dt < 10.0, "took " + std::to_string(dt) + " s");
  return c;
}

Check ols_oracle() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(7);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FeatureVector> x(14);
    for (auto& r : x) r = oracle::random_features(gen);
    FeatureVector beta{};
    for (auto& b : beta) b = coef(gen);
    std::vector<double> noisy;
    std::vector<double> exact;
    for (const auto& r : x) {
      double v = 140.0;
      for (std::size_t j = 0; j < kFeatureCount; ++j) v += beta[j] * r[j];
      exact.push_back(v);
      noisy.push_back(v + noise(gen));
    }
    const auto m = fit_ols(std::span<const FeatureVector>(x), std::span<const double>(noisy));
    const auto ref = oracle::ols(x, noisy, 0.0L);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double e = static_cast<double>(ref.weights[j]);
      c.expect(std::fabs(m.weights[j] - e) <= 1e-8 * std::max(1.0, std::fabs(e)),
               "weight mismatch in trial " + std::to_string(trial));
    }
    c.expect(std::fabs(m.intercept - static_cast<double>(ref.intercept)) <=
                 1e-8 * std::fabs(static_cast<double>(ref.intercept)),
             "intercept mismatch in trial " + std::to_string(trial));

    const auto affine = fit_ols(std::span<const FeatureVector>(x), std::span<const double>(exact));
    const auto slopes = affine.raw_slopes();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      c.expect(std::fabs(slopes[j] - beta[j]) <= 1e-8 * std::max(1.0, std::fabs(beta[j])),
               "affine slope not recovered in trial " + std::to_string(trial));
    }
    c.expect(std::fabs(affine.raw_intercept() - 140.0) <= 1e-8 * 140.0,
             "affine intercept not recovered in trial " + std::to_string(trial));
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, "took " + std::to_string(dt) + " s");
  return c;
}

Check grnn_limits() {
  Check c;
  std::vector<FeatureVector> units;
  std::vector<double> t;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    FeatureVector f{};
    f[i] = 1.0;
    units.push_back(f);
    t.push_back(135.0 + static_cast<double>(i));
  }
  const GrnnModel sharp(units, t, 1e-3, Standardizer{});
  for (std::size_t i = 0; i < units.size(); ++i) {
    c.expect(std::fabs(predict_grnn(sharp, units[i]) - t[i]) <= 1e-9, "sigma=1e-3 recovery");
  }

  std::mt19937_64 gen(11);
  const double mean = 139.0;
  const GrnnModel wide(units, t, 1e6, Standardizer{});
  for (int i = 0; i < 20; ++i) {
    c.expect(std::fabs(predict_grnn(wide, oracle::random_features(gen)) - mean) <= 1e-6,
             "sigma=1e6 mean");
  }

  std::uniform_real_distribution<double> y(120.0, 170.0);
  std::uniform_real_distribution<double> log_sigma(-4.0, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 10;
    std::vector<FeatureVector> p(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = oracle::random_features(gen);
      v[i] = y(gen);
    }
    const double sigma = std::exp(log_sigma(gen));
    const GrnnModel m(p, v, sigma, Standardizer{});
    const auto q = oracle::random_features(gen, -3, 3);
    const double pred = predict_grnn(m, q);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    c.expect(std::isfinite(pred) && pred >= *lo && pred <= *hi, "prediction outside target range");
    if (sigma >= 0.5) {
      const double direct = static_cast<double>(oracle::grnn_direct(p, v, sigma, q));
      c.expect(std::fabs(pred - direct) <= 1e-10, "stabilized differs from direct formula");
    }
  }
  return c;
}

Check table_structure(const fs::path& dir) {
  Check c;
  const auto data = (dir / "data.csv").string();
  c.expect(run_cli({"gen-data", "--n", "22", "--seed", "1", "--out", data}) == 0, "gen-data failed");
  for (const char* t : {"ibp", "fbp"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const int code = run_cli({"sweep", "--data", data, "--target", t, "--out", (dir / "sweep").string()});
    const double dt = seconds_since(t0);
    c.expect(code == 0, std::string("sweep ") + t + " failed");
    c.expect(dt < 60.0, "sweep took " + std::to_string(dt) + " s");
    const auto rows = lines_of(slurp(dir / "sweep" / (std::string("sweep_") + t + ".csv")));
    c.expect(rows.size() == 32, "expected 31 rows, got " + std::to_string(rows.size() - 1));
    if (rows.size() != 32) continue;
    std::vector<std::string> expected = {"linear", "grnn"};
    for (int h = 2; h <= 30; ++h) expected.push_back("mlfn:" + std::to_string(h));
    for (std::size_t i = 0; i < expected.size(); ++i) {
      c.expect(rows[i + 1].rfind(expected[i] + ",14,8,", 0) == 0, "row " + std::to_string(i + 1) +
                                                                      " is " + rows[i + 1]);
    }
  }
  return c;
}

Check sanity_ordering() {
  Check c;
  SweepConfig cfg;
  cfg.threads = 1;
  for (const auto target : kAllTargets) {
    const auto affine = run_sweep(generate_affine(22, 1), target, cfg);
    c.expect(affine.best == ModelId::linear(), "affine best is " + affine.best.label());
    c.expect(affine.rows[0].rms < 1e-6, "affine linear rms " + std::to_string(affine.rows[0].rms));

    const auto nonlinear = run_sweep(generate_synthetic(22, 1), target, cfg);
    const bool mlfn_wins = std::any_of(
        nonlinear.rows.begin() + 2, nonlinear.rows.end(),
        [&](const SweepRow& r) { return r.rms < nonlinear.rows[0].rms; });
    c.expect(mlfn_wins, "no MLFN row beats Linear for " + std::string(column_name(target)));
  }
  return c;
}

Check divergence() {
  Check c;
  SweepConfig cfg;
  cfg.mlfn.learning_rate = 50.0;
  cfg.mlfn_max = 12;
  SweepResult r;
  try {
    r = run_sweep(generate_synthetic(22, 1), TargetKind::FinalBoilingPoint, cfg);
  } catch (const std::exception& e) {
    c.expect(false, std::string("sweep aborted: ") + e.what());
    return c;
  }
  std::size_t flagged = 0;
  for (const auto& row : r.rows) {
    c.expect(std::isfinite(row.rms), "non-finite rms in " + row.model.label());
    flagged += row.diverged;
  }
  c.expect(flagged > 0, "no diverged row flagged");
  c.expect(r.rows.size() == 13, "sweep dropped rows");
  return c;
}

Check determinism(const fs::path& dir) {
  Check c;
  const auto d = dir / "det";
  auto twice = [&](const std::vector<std::string>& args, const std::vector<std::string>& files) {
    std::vector<std::string> first;
    for (int pass = 0; pass < 2; ++pass) {
      fs::remove_all(d / "out");
      fs::create_directories(d / "out");
      std::string stdout_text;
      c.expect(run_cli(args, &stdout_text) == 0, "command failed: " + args[0]);
      std::vector<std::string> now = {stdout_text};
      for (const auto& f : files) now.push_back(slurp(d / "out" / f));
      if (pass == 0) first = now;
      else c.expect(now == first, args[0] + " output differs between runs");
    }
  };
  fs::create_directories(d);
  const auto data = (d / "data.csv").string();
  const auto out = (d / "out").string();
  run_cli({"gen-data", "--seed", "3", "--out", data});
  twice({"gen-data", "--seed", "3", "--out", out + "/g.csv"}, {"g.csv"});
  twice({"sweep", "--data", data, "--target", "fbp", "--seed", "5", "--mlfn-max", "8", "--out", out},
        {"sweep_fbp.csv", "sweep_fbp.txt", "best_fbp.json"});
  twice({"train", "--data", data, "--target", "ibp", "--model", "mlfn:5", "--seed", "9", "--out",
         out + "/m.json"},
        {"m.json"});
  const auto model = (d / "model.json").string();
  run_cli({"train", "--data", data, "--target", "ibp", "--model", "grnn", "--out", model});
  twice({"predict", "--model", model, "--data", data, "--out", out + "/p.csv"}, {"p.csv"});
  twice({"report", "--model", model, "--data", data, "--out", out + "/r.csv"}, {"r.csv"});

  const auto ds = generate_synthetic(22, 6);
  SweepConfig cfg;
  cfg.master_seed = 17;
  for (const auto target : kAllTargets) {
    cfg.threads = 1;
    const auto serial = run_sweep(ds, target, cfg);
    for (const std::size_t threads : {2u, 4u, 8u}) {
      cfg.threads = threads;
      const auto parallel = run_sweep(ds, target, cfg);
      c.expect(parallel.rows == serial.rows && parallel.best == serial.best,
               "sweep depends on thread count " + std::to_string(threads));
    }
  }
  return c;
}

Check rms_values() {
  Check c;
  const std::vector<double> zero = {0, 0};
  const std::vector<double> v = {3, 4};
  c.expect(std::fabs(rms_error(zero, v) - std::sqrt(12.5)) <= 1e-12, "sqrt(12.5) case");
  c.expect(rms_error(v, v) == 0.0, "identical vectors");
  return c;
}

}  // namespace

int main() {
  const auto dir = fs::temp_directory_path() / "xylreg_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"1 gradient oracle", gradient_oracle},
      {"2 OLS oracle", ols_oracle},
      {"3 GRNN limits", grnn_limits},
      {"4 sweep table structure", [&] { return table_structure(dir); }},
      {"5 sanity ordering", sanity_ordering},
      {"6 divergence handling", divergence},
      {"7 determinism", [&] { return determinism(dir); }},
      {"8 rms_error values", rms_values},
  };

  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s  criterion %-26s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", name.c_str(),
                seconds_since(t0), c.ok ? "" : "  ", c.why.c_str());
    failed += !c.ok;
  }
  fs::remove_all(dir);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
