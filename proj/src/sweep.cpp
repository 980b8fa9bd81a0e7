#include "xylreg/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "xylreg/error.hpp"
#include "xylreg/rng.hpp"

namespace xylreg {

ModelId ModelId::mlfn(std::size_t hidden) {
  if (hidden == 0) {
    throw Error(ErrorCode::InvalidHiddenCount, "MLFN needs at least 1 hidden node");
  }
  return {Kind::Mlfn, hidden};
}

std::string ModelId::tag() const {
  switch (kind) {
    case Kind::Linear: return "linear";
    case Kind::Grnn: return "grnn";
    case Kind::Mlfn: return "mlfn:" + std::to_string(hidden);
  }
  return "unknown";
}

std::string ModelId::label() const {
  switch (kind) {
    case Kind::Linear: return "Linear prediction";
    case Kind::Grnn: return "GRNN";
    case Kind::Mlfn: return "MLFN " + std::to_string(hidden) + " Nodes";
  }
  return "unknown";
}

std::optional<ModelId> ModelId::parse(std::string_view tag) {
  if (tag == "linear") return linear();
  if (tag == "grnn") return grnn();
  if (tag.starts_with("mlfn:")) {
    tag.remove_prefix(5);
    std::size_t h = 0;
    const auto [ptr, ec] = std::from_chars(tag.data(), tag.data() + tag.size(), h);
    if (ec == std::errc{} && ptr == tag.data() + tag.size() && h > 0) return mlfn(h);
  }
  return std::nullopt;
}

double rms_error(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "rms_error: " + std::to_string(predicted.size()) + " predictions vs " +
                    std::to_string(actual.size()) + " actuals");
  }
  if (predicted.empty()) throw Error(ErrorCode::EmptyInput, "rms_error: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double r = predicted[i] - actual[i];
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

EvalReport evaluate(const Model& model, const Dataset& test, TargetKind target) {
  if (test.size() == 0) throw Error(ErrorCode::EmptyTestSet, "empty test set");
  const auto actual = test.target_values(target);
  std::vector<double> predicted;
  predicted.reserve(test.size());
  EvalReport report;
  report.pairs.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    predicted.push_back(predict(model, test[i].features));
    report.pairs.emplace_back(actual[i], predicted.back());
  }
  report.rms = rms_error(predicted, actual);
  return report;
}

std::uint64_t candidate_seed(std::uint64_t master_seed, const ModelId& id) {
  return splitmix64(master_seed ^ fnv1a64(id.tag()));
}

namespace {

struct CandidateOutcome {
  SweepRow row;
  std::optional<Model> model;
};

CandidateOutcome run_candidate(const ModelId& id, const Split& split, TargetKind target,
                               const SweepConfig& cfg) {
  CandidateOutcome out;
  out.row.model = id;
  out.row.trained = split.train.size();
  out.row.tested = split.test.size();

  Model model = LinearModel{};
  switch (id.kind) {
    case ModelId::Kind::Linear: {
      auto lm = fit_ols(split.train, target);
      out.row.notes = "ridge=" + format_real(lm.ridge) + (lm.ridge_fallback ? " fallback" : "");
      model = std::move(lm);
      break;
    }
    case ModelId::Kind::Grnn: {
      const double sigma = select_bandwidth(split.train, target, cfg.grnn_bandwidths);
      out.row.notes = "sigma=" + format_real(sigma) + " loo";
      model = fit_grnn(split.train, target, sigma);
      break;
    }
    case ModelId::Kind::Mlfn: {
      TrainConfig tc = cfg.mlfn;
      tc.seed = candidate_seed(cfg.master_seed, id);
      auto result = train_mlfn(split.train, target, id.hidden, tc);
      out.row.diverged = result.history.stop == StopReason::Diverged;
      out.row.notes = "epochs=" + std::to_string(result.history.train_mse.size()) +
                      " stop=" + std::string(to_string(result.history.stop));
      model = std::move(result.model);
      break;
    }
  }

  double rms = evaluate(model, split.test, target).rms;
  if (!std::isfinite(rms)) {
    rms = std::numeric_limits<double>::max();
    out.row.diverged = true;
    out.row.notes += " rms-clamped";
  }
  out.row.rms = rms;
  out.model = std::move(model);
  return out;
}

}  // namespace

SweepResult run_sweep(const Dataset& ds, TargetKind target, const SweepConfig& cfg) {
  if (cfg.mlfn_min < 1 || cfg.mlfn_max < cfg.mlfn_min) {
    throw Error(ErrorCode::InvalidConfig, "MLFN node range is empty");
  }
  cfg.mlfn.validate();
  if (!ds.has_target(target)) {
    throw Error(ErrorCode::MissingTarget,
                "dataset has no " + std::string(column_name(target)) + " column");
  }
  const Split shared = split(ds, cfg.train_count, cfg.master_seed);

  std::vector<ModelId> ids = {ModelId::linear(), ModelId::grnn()};
  for (std::size_t h = cfg.mlfn_min; h <= cfg.mlfn_max; ++h) ids.push_back(ModelId::mlfn(h));

  std::vector<CandidateOutcome> outcomes(ids.size());
  std::vector<std::exception_ptr> failures(ids.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      try {
        outcomes[i] = run_candidate(ids[i], shared, target, cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  std::size_t threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, ids.size());
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  SweepResult result;
  result.target = target;
  result.master_seed = cfg.master_seed;
  result.train_rows = shared.train_rows;
  result.rows.reserve(outcomes.size());
  for (const auto& o : outcomes) result.rows.push_back(o.row);
  result.best = select_best(result.rows);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == result.best) result.best_model = outcomes[i].model;
  }
  return result;
}

ModelId select_best(std::span<const SweepRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyRows, "no sweep rows to rank");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].rms < rows[best].rms) best = i;
  }
  return rows[best].model;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "model,trained,tested,rms,diverged,notes\n";
  for (const auto& r : result.rows) {
    std::string notes = r.notes;
    if (notes.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (const char c : notes) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      notes = quoted + "\"";
    }
    out << r.model.tag() << ',' << r.trained << ',' << r.tested << ','
        << format_real(r.rms) << ',' << (r.diverged ? "true" : "false") << ','
        << notes << '\n';
  }
}

std::string format_sweep_table(const SweepResult& result) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %16s %15s %12s\n", "ANN model",
                "Trained samples", "Tested samples", "RMS error");
  out << "Target: " << column_name(result.target) << "\n" << line;
  bool any_diverged = false;
  for (const auto& r : result.rows) {
    std::snprintf(line, sizeof line,
                  r.rms < 1e9 ? "%-20s %16zu %15zu %12.4f%s\n" : "%-20s %16zu %15zu %12.4e%s\n",
                  r.model.label().c_str(), r.trained, r.tested, r.rms,
                  r.diverged ? " *" : "");
    out << line;
    any_diverged = any_diverged || r.diverged;
  }
  const auto best = std::find_if(result.rows.begin(), result.rows.end(),
                                 [&](const SweepRow& r) { return r.model == result.best; });
  if (best != result.rows.end()) {
    std::snprintf(line, sizeof line, "Best: %s (RMS %.4f)\n",
                  best->model.label().c_str(), best->rms);
    out << line;
  }
  if (any_diverged) out << "* training diverged; RMS from the last finite parameters\n";
  return out.str();
}

}  // namespace xylreg
