#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xylreg/dataset.hpp"
#include "xylreg/model.hpp"

namespace xylreg {

/// A sweep candidate. Ordering is the canonical table order: Linear, GRNN,
/// then MLFN by ascending hidden count.
struct ModelId {
  enum class Kind { Linear = 0, Grnn = 1, Mlfn = 2 };

  Kind kind = Kind::Linear;
  std::size_t hidden = 0;  // Mlfn only

  static ModelId linear() { return {Kind::Linear, 0}; }
  static ModelId grnn() { return {Kind::Grnn, 0}; }
  /// Throws InvalidHiddenCount when hidden == 0.
  static ModelId mlfn(std::size_t hidden);

  /// "linear", "grnn", "mlfn:7".
  std::string tag() const;
  /// "Linear prediction", "GRNN", "MLFN 7 Nodes".
  std::string label() const;
  static std::optional<ModelId> parse(std::string_view tag);

  friend auto operator<=>(const ModelId&, const ModelId&) = default;
};

struct SweepRow {
  ModelId model;
  std::size_t trained = 0;
  std::size_t tested = 0;
  double rms = 0.0;  // degC, always finite
  bool diverged = false;
  std::string notes;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepConfig {
  std::size_t train_count = 14;
  std::uint64_t master_seed = 0;
  std::size_t mlfn_min = 2;
  std::size_t mlfn_max = 30;
  /// Seed is overridden per candidate.
  TrainConfig mlfn;
  std::vector<double> grnn_bandwidths = default_bandwidths();
  /// Worker threads for candidate training; 0 uses the hardware count.
  std::size_t threads = 0;
};

struct SweepResult {
  TargetKind target = TargetKind::InitialBoilingPoint;
  std::vector<SweepRow> rows;
  ModelId best;
  std::uint64_t master_seed = 0;
  /// Source indices of the shared training split.
  std::vector<std::size_t> train_rows;
  /// Fitted model for `best`.
  std::optional<Model> best_model;
};

/// Root mean square of predicted - actual. Throws LengthMismatch or
/// EmptyInput.
double rms_error(std::span<const double> predicted, std::span<const double> actual);

struct EvalReport {
  /// (actual, predicted) per row, in row order.
  std::vector<std::pair<double, double>> pairs;
  double rms = 0.0;
};

/// Throws EmptyTestSet when `test` has no rows and MissingTarget when it
/// lacks the target column.
EvalReport evaluate(const Model& model, const Dataset& test, TargetKind target);

/// Per-candidate training seed: splitmix64(master_seed ^ fnv1a64(id.tag())).
/// Depends only on the candidate's own id.
std::uint64_t candidate_seed(std::uint64_t master_seed, const ModelId& id);

/// Trains and scores every candidate on one shared split. A diverged MLFN
/// produces a flagged row, never an error.
SweepResult run_sweep(const Dataset& ds, TargetKind target, const SweepConfig& cfg);

/// Smallest rms; ties go to the earliest row. Throws EmptyRows.
ModelId select_best(std::span<const SweepRow> rows);

/// Columns: model,trained,tested,rms,diverged,notes
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// Aligned text table: model, trained, tested, RMS, then the best row.
std::string format_sweep_table(const SweepResult& result);

}  // namespace xylreg
