#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xylreg {

enum class ErrorCode {
  // dataset
  MissingHeader,
  UnknownColumn,
  NonNumericCell,
  WrongArity,
  EmptyDataset,
  InvalidTrainCount,
  TooFewRows,
  ArityMismatch,
  InvalidCount,
  MissingTarget,
  // models
  SingularSystem,
  EmptyTrainSet,
  NonPositiveSigma,
  EmptyCandidates,
  InvalidHiddenCount,
  InvalidConfig,
  EmptyBatch,
  // evaluation
  LengthMismatch,
  EmptyInput,
  EmptyTestSet,
  EmptyRows,
  // persistence
  BadArchive,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Failure raised by every operation in the library. `row` and `column` are
/// 1-based locations for data errors (row 1 is the first record after the
/// header).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::size_t> column = std::nullopt)
      : std::runtime_error(what), code_(code), row_(row), column_(column) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

}  // namespace xylreg
