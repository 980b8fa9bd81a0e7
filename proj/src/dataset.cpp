#include "xylreg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "xylreg/error.hpp"
#include "xylreg/rng.hpp"

namespace xylreg {

namespace {

constexpr std::array<double, kFeatureCount> kComponentBoilingPoints = {
    100.0, 110.6, 136.2, 138.4, 139.1, 152.4, 144.4, 159.2, 165.0};

constexpr std::array<std::array<double, 2>, kFeatureCount> kFractionRanges = {{
    {0.0, 2.0},    // nonaromatics
    {0.0, 2.0},    // toluene
    {10.0, 20.0},  // ethylbenzene
    {15.0, 25.0},  // p_xylene
    {35.0, 50.0},  // m_xylene
    {0.0, 1.0},    // isopropylbenzene
    {15.0, 25.0},  // o_xylene
    {0.0, 1.0},    // n_propylbenzene
    {0.0, 6.0},    // c9_aromatics
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

// Lines with any trailing '\r' removed; blank lines are dropped.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

FeatureVector draw_composition(Rng& rng) {
  FeatureVector f{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    f[j] = rng.uniform(kFractionRanges[j][0], kFractionRanges[j][1]);
  }
  const double total = std::accumulate(f.begin(), f.end(), 0.0);
  for (auto& v : f) v *= 100.0 / total;
  return f;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_column_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "nonaromatics", "toluene",          "ethylbenzene",
      "p_xylene",     "m_xylene",         "isopropylbenzene",
      "o_xylene",     "n_propylbenzene",  "c9_aromatics"};
  return names;
}

std::string_view column_name(TargetKind kind) {
  return kind == TargetKind::InitialBoilingPoint ? "ibp_c" : "fbp_c";
}

std::string_view short_name(TargetKind kind) {
  return kind == TargetKind::InitialBoilingPoint ? "ibp" : "fbp";
}

std::optional<TargetKind> parse_target(std::string_view name) {
  if (name == "ibp" || name == "ibp_c") return TargetKind::InitialBoilingPoint;
  if (name == "fbp" || name == "fbp_c") return TargetKind::FinalBoilingPoint;
  return std::nullopt;
}

double Sample::target(TargetKind kind) const {
  const auto it = targets.find(kind);
  if (it == targets.end()) {
    throw Error(ErrorCode::MissingTarget,
                "sample has no " + std::string(column_name(kind)) + " value");
  }
  return it->second;
}

Dataset::Dataset(std::vector<Sample> samples, std::set<TargetKind> targets_present)
    : samples_(std::move(samples)), targets_(std::move(targets_present)) {
  if (samples_.empty()) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.targets.size() != targets_.size()) {
      throw Error(ErrorCode::MissingTarget,
                  "row " + std::to_string(i + 1) + " has a different target set",
                  i + 1);
    }
    for (const auto& [kind, value] : s.targets) {
      if (!targets_.contains(kind)) {
        throw Error(ErrorCode::MissingTarget,
                    "row " + std::to_string(i + 1) + " has unexpected target " +
                        std::string(column_name(kind)),
                    i + 1);
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonNumericCell,
                    "row " + std::to_string(i + 1) + " has a non-finite target",
                    i + 1);
      }
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (!std::isfinite(s.features[j])) {
        throw Error(ErrorCode::NonNumericCell,
                    "row " + std::to_string(i + 1) + " has a non-finite feature",
                    i + 1, j + 1);
      }
    }
  }
}

std::vector<FeatureVector> Dataset::features() const {
  std::vector<FeatureVector> rows;
  rows.reserve(samples_.size());
  for (const auto& s : samples_) rows.push_back(s.features);
  return rows;
}

std::vector<double> Dataset::target_values(TargetKind kind) const {
  if (!has_target(kind)) {
    throw Error(ErrorCode::MissingTarget,
                "dataset has no " + std::string(column_name(kind)) + " column");
  }
  std::vector<double> values;
  values.reserve(samples_.size());
  for (const auto& s : samples_) values.push_back(s.targets.at(kind));
  return values;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Sample> picked;
  picked.reserve(rows.size());
  for (const auto r : rows) picked.push_back(samples_.at(r));
  return Dataset(std::move(picked), targets_);
}

// ---------------------------------------------------------------------------

std::vector<std::string> csv_header(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<std::string> header;
  if (lines.empty()) return header;
  for (const auto cell : split_cells(lines.front())) header.emplace_back(cell);
  return header;
}

Dataset load_csv(std::istream& in, TargetColumns targets) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  auto lines = split_lines(text);
  if (lines.empty()) {
    throw Error(ErrorCode::MissingHeader, "input is empty; expected a header row");
  }
  if (lines.front().size() >= 3 && lines.front().substr(0, 3) == "\xEF\xBB\xBF") {
    lines.front().remove_prefix(3);
  }

  const auto header = split_cells(lines.front());
  if (parse_real(header.front())) {
    throw Error(ErrorCode::MissingHeader,
                "first line holds numbers; expected a header row", std::nullopt, 1);
  }
  const auto& names = feature_column_names();
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (j >= header.size()) {
      throw Error(ErrorCode::MissingHeader,
                  "header has " + std::to_string(header.size()) +
                      " columns; expected feature column '" + names[j] + "'",
                  std::nullopt, j + 1);
    }
    if (header[j] != names[j]) {
      throw Error(ErrorCode::UnknownColumn,
                  "header column " + std::to_string(j + 1) + " is '" +
                      std::string(header[j]) + "'; expected '" + names[j] + "'",
                  std::nullopt, j + 1);
    }
  }
  std::vector<TargetKind> target_order;
  for (std::size_t j = kFeatureCount; j < header.size(); ++j) {
    const auto kind = parse_target(header[j]);
    if (!kind || header[j] != column_name(*kind) ||
        std::find(target_order.begin(), target_order.end(), *kind) !=
            target_order.end()) {
      throw Error(ErrorCode::UnknownColumn,
                  "unknown or repeated column '" + std::string(header[j]) + "'",
                  std::nullopt, j + 1);
    }
    target_order.push_back(*kind);
  }
  if (target_order.empty() && targets == TargetColumns::Required) {
    throw Error(ErrorCode::MissingTarget,
                "header has no target column (ibp_c or fbp_c)");
  }

  std::vector<Sample> samples;
  samples.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;
    const auto cells = split_cells(lines[li]);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::WrongArity,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells; expected " +
                      std::to_string(header.size()),
                  row);
    }
    Sample s;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto value = parse_real(cells[j]);
      if (!value) {
        throw Error(ErrorCode::NonNumericCell,
                    "row " + std::to_string(row) + ", column " +
                        std::to_string(j + 1) + ": '" + std::string(cells[j]) +
                        "' is not a decimal number",
                    row, j + 1);
      }
      if (j < kFeatureCount) {
        s.features[j] = *value;
      } else {
        s.targets[target_order[j - kFeatureCount]] = *value;
      }
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) {
    throw Error(ErrorCode::EmptyDataset, "header present but no data rows", 1);
  }
  return Dataset(std::move(samples),
                 std::set<TargetKind>(target_order.begin(), target_order.end()));
}

Dataset load_csv_file(const std::filesystem::path& path, TargetColumns targets) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  }
  return load_csv(in, targets);
}

std::string format_real(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void save_csv(std::ostream& out, const Dataset& ds) {
  const auto& names = feature_column_names();
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (j) out << ',';
    out << names[j];
  }
  for (const auto kind : ds.targets_present()) out << ',' << column_name(kind);
  out << '\n';
  for (const auto& s : ds.samples()) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (j) out << ',';
      out << format_real(s.features[j]);
    }
    for (const auto kind : ds.targets_present()) {
      out << ',' << format_real(s.targets.at(kind));
    }
    out << '\n';
  }
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  save_csv(out, ds);
  return out.str();
}

std::string fingerprint(const Dataset& ds) {
  std::array<char, 17> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + 16, fnv1a64(to_csv(ds)), 16);
  std::string hex(buf.data(), ptr);
  return std::string(16 - hex.size(), '0') + hex;
}

// ---------------------------------------------------------------------------

std::vector<Diagnostic> validate(const Dataset& ds, double sum_tolerance) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& f = ds[i].features;
    const double total = std::accumulate(f.begin(), f.end(), 0.0);
    if (std::abs(total - 100.0) > sum_tolerance) {
      out.push_back({DiagnosticKind::SumDeviation, i + 1, std::nullopt,
                     "row " + std::to_string(i + 1) + ": fractions sum to " +
                         format_real(total) + ", not 100"});
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (f[j] < 0.0) {
        out.push_back({DiagnosticKind::NegativeFraction, i + 1, j + 1,
                       "row " + std::to_string(i + 1) + ": " +
                           feature_column_names()[j] + " is negative (" +
                           format_real(f[j]) + ")"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Split split(const Dataset& ds, std::size_t train_count, std::uint64_t seed) {
  if (train_count < 1 || train_count >= ds.size()) {
    throw Error(ErrorCode::InvalidTrainCount,
                "train count " + std::to_string(train_count) +
                    " must be in [1, " + std::to_string(ds.size() - 1) + "]");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::vector<std::size_t> train_rows(order.begin(), order.begin() + train_count);
  std::vector<std::size_t> test_rows(order.begin() + train_count, order.end());
  return Split{ds.subset(train_rows), ds.subset(test_rows), seed,
               std::move(train_rows), std::move(test_rows)};
}

// ---------------------------------------------------------------------------

Standardizer::Standardizer() {
  means_.fill(0.0);
  stddevs_.fill(1.0);
}

Standardizer::Standardizer(const FeatureVector& means, const FeatureVector& stddevs)
    : means_(means), stddevs_(stddevs) {
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (!std::isfinite(means_[j]) || !std::isfinite(stddevs_[j]) ||
        !(stddevs_[j] > 0.0)) {
      throw Error(ErrorCode::InvalidConfig,
                  "standardizer needs finite means and positive stddevs");
    }
  }
}

FeatureVector Standardizer::apply(const FeatureVector& x) const {
  FeatureVector z{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    z[j] = (x[j] - means_[j]) / stddevs_[j];
  }
  return z;
}

Standardizer fit_standardizer(std::span<const FeatureVector> rows) {
  if (rows.size() < 2) {
    throw Error(ErrorCode::TooFewRows,
                "standardizer needs at least 2 rows, got " +
                    std::to_string(rows.size()));
  }
  const auto n = static_cast<double>(rows.size());
  FeatureVector means{};
  FeatureVector stddevs{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[j];
    means[j] = sum / n;
    // Second pass on centered values.
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - means[j]) * (r[j] - means[j]);
    const double sd = std::sqrt(ss / n);
    stddevs[j] = sd < kDegenerateStddev ? 1.0 : sd;
  }
  return Standardizer(means, stddevs);
}

Standardizer fit_standardizer(const Dataset& train) {
  const auto rows = train.features();
  return fit_standardizer(std::span<const FeatureVector>(rows));
}

FeatureVector to_feature_vector(std::span<const double> x) {
  if (x.size() != kFeatureCount) {
    throw Error(ErrorCode::ArityMismatch,
                "feature vector has " + std::to_string(x.size()) +
                    " entries; expected " + std::to_string(kFeatureCount));
  }
  FeatureVector v{};
  std::copy(x.begin(), x.end(), v.begin());
  return v;
}

FeatureVector standardize(const Standardizer& s, std::span<const double> x) {
  return s.apply(to_feature_vector(x));
}

// ---------------------------------------------------------------------------

Dataset generate_synthetic(std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidCount,
                "synthetic dataset needs n >= 2, got " + std::to_string(n));
  }
  Rng rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.features = draw_composition(rng);
    const auto& f = s.features;
    double tm = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      tm += f[j] * kComponentBoilingPoints[j];
    }
    tm /= 100.0;
    const double light = f[0] + f[1];
    const double heavy = f[5] + f[7] + f[8];
    const double e1 = rng.uniform(-0.05, 0.05);
    const double e2 = rng.uniform(-0.05, 0.05);
    s.targets[TargetKind::InitialBoilingPoint] =
        tm - 3.0 - 9.0 * (1.0 - std::exp(-light / 0.8)) + e1;
    s.targets[TargetKind::FinalBoilingPoint] =
        tm + 2.0 + 12.0 * std::tanh(heavy / 2.5) + e2;
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples),
                 {TargetKind::InitialBoilingPoint, TargetKind::FinalBoilingPoint});
}

Dataset generate_affine(std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidCount,
                "affine dataset needs n >= 2, got " + std::to_string(n));
  }
  Rng rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.features = draw_composition(rng);
    const auto& f = s.features;
    const double ibp = 120.0 + 0.15 * f[2] + 0.2 * f[3] + 0.1 * f[4] +
                       0.05 * f[6] - 0.8 * f[1];
    s.targets[TargetKind::InitialBoilingPoint] = ibp;
    s.targets[TargetKind::FinalBoilingPoint] = ibp + 10.0 + 0.5 * f[8];
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples),
                 {TargetKind::InitialBoilingPoint, TargetKind::FinalBoilingPoint});
}

}  // namespace xylreg
