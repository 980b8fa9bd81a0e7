#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xylreg {

inline constexpr std::size_t kFeatureCount = 9;

/// Component mass fractions in weight-%, in the fixed CSV column order.
using FeatureVector = std::array<double, kFeatureCount>;

/// nonaromatics, toluene, ethylbenzene, p_xylene, m_xylene, isopropylbenzene,
/// o_xylene, n_propylbenzene, c9_aromatics
const std::array<std::string, kFeatureCount>& feature_column_names();

enum class TargetKind { InitialBoilingPoint, FinalBoilingPoint };

inline constexpr std::array<TargetKind, 2> kAllTargets = {
    TargetKind::InitialBoilingPoint, TargetKind::FinalBoilingPoint};

/// CSV column name: `ibp_c` or `fbp_c`.
std::string_view column_name(TargetKind kind);
/// Command-line name: `ibp` or `fbp`.
std::string_view short_name(TargetKind kind);
std::optional<TargetKind> parse_target(std::string_view name);

struct Sample {
  FeatureVector features{};
  std::map<TargetKind, double> targets;

  double target(TargetKind kind) const;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// An ordered, non-empty table of samples. Every sample carries exactly the
/// targets listed in targets_present. Negative or non-closing fractions are
/// allowed here and reported by validate().
class Dataset {
 public:
  Dataset(std::vector<Sample> samples, std::set<TargetKind> targets_present);

  const std::array<std::string, kFeatureCount>& feature_names() const {
    return feature_column_names();
  }
  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  const std::set<TargetKind>& targets_present() const { return targets_; }
  bool has_target(TargetKind kind) const { return targets_.contains(kind); }

  std::vector<FeatureVector> features() const;
  /// Throws MissingTarget when the column is absent.
  std::vector<double> target_values(TargetKind kind) const;
  Dataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sample> samples_;
  std::set<TargetKind> targets_;
};

// ---------------------------------------------------------------------------
// CSV

enum class TargetColumns { Required, Optional };

/// Parses a header row followed by records. The first nine columns must be
/// the feature columns in canonical order; they may be followed by `ibp_c`
/// and/or `fbp_c`. With TargetColumns::Optional a features-only file is
/// accepted.
Dataset load_csv(std::istream& in,
                 TargetColumns targets = TargetColumns::Required);
Dataset load_csv_file(const std::filesystem::path& path,
                      TargetColumns targets = TargetColumns::Required);

/// Splits the first line of a CSV document into trimmed header cells.
std::vector<std::string> csv_header(std::string_view text);

/// Writes the canonical CSV form. Reals use the shortest representation that
/// reads back to the same double.
void save_csv(std::ostream& out, const Dataset& ds);
std::string to_csv(const Dataset& ds);

/// FNV-1a over the canonical CSV form, as 16 hex digits.
std::string fingerprint(const Dataset& ds);

std::string format_real(double value);

// ---------------------------------------------------------------------------
// Validation

enum class DiagnosticKind { SumDeviation, NegativeFraction };

struct Diagnostic {
  DiagnosticKind kind;
  std::size_t row;                    // 1-based
  std::optional<std::size_t> column;  // 1-based, NegativeFraction only
  std::string message;
};

std::vector<Diagnostic> validate(const Dataset& ds, double sum_tolerance);

// ---------------------------------------------------------------------------
// Train/test split

struct Split {
  Dataset train;
  Dataset test;
  std::uint64_t seed;
  std::vector<std::size_t> train_rows;  // indices into the source dataset
  std::vector<std::size_t> test_rows;
};

/// Fisher-Yates shuffle of the row indices keyed by `seed`; the first
/// `train_count` shuffled rows train, the rest test. Both index lists are
/// returned in shuffled order.
Split split(const Dataset& ds, std::size_t train_count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Standardization

/// Per-feature z-score map. Degenerate features carry stddev 1.
class Standardizer {
 public:
  /// Identity map.
  Standardizer();
  Standardizer(const FeatureVector& means, const FeatureVector& stddevs);

  const FeatureVector& means() const { return means_; }
  const FeatureVector& stddevs() const { return stddevs_; }

  FeatureVector apply(const FeatureVector& x) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  FeatureVector means_;
  FeatureVector stddevs_;
};

inline constexpr double kDegenerateStddev = 1e-12;

/// Population mean and stddev per feature. Throws TooFewRows below 2 rows.
Standardizer fit_standardizer(const Dataset& train);
Standardizer fit_standardizer(std::span<const FeatureVector> rows);

/// Throws ArityMismatch unless x has kFeatureCount entries.
FeatureVector standardize(const Standardizer& s, std::span<const double> x);

/// Copies a span into a FeatureVector, throwing ArityMismatch on size.
FeatureVector to_feature_vector(std::span<const double> x);

// ---------------------------------------------------------------------------
// Synthetic data

/// Surrogate composition data for a mixed-xylene stream.
///
/// Each fraction is drawn uniformly from a per-component range (weight-%):
///   nonaromatics [0,2]  toluene [0,2]  ethylbenzene [10,20]
///   p_xylene [15,25]    m_xylene [35,50]  isopropylbenzene [0,1]
///   o_xylene [15,25]    n_propylbenzene [0,1]  c9_aromatics [0,6]
/// and the row is rescaled to sum to 100.
///
/// With Tm the fraction-weighted mean of the component boiling points
///   {100, 110.6, 136.2, 138.4, 139.1, 152.4, 144.4, 159.2, 165} degC,
/// light = nonaromatics + toluene and heavy = isopropylbenzene +
/// n_propylbenzene + c9_aromatics:
///   ibp = Tm - 3 - 9 (1 - exp(-light / 0.8)) + e1
///   fbp = Tm + 2 + 12 tanh(heavy / 2.5)     + e2
/// with e1, e2 uniform on [-0.05, 0.05]. Hence ibp < Tm - 2.9 < fbp.
Dataset generate_synthetic(std::size_t n, std::uint64_t seed);

/// Same compositions as generate_synthetic, with noiseless targets that are
/// exactly affine in the fractions:
///   ibp = 120 + 0.15 ethylbenzene + 0.2 p_xylene + 0.1 m_xylene
///             + 0.05 o_xylene - 0.8 toluene
///   fbp = ibp + 10 + 0.5 c9_aromatics
Dataset generate_affine(std::size_t n, std::uint64_t seed);

}  // namespace xylreg
