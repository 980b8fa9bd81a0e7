#include "xylreg/error.hpp"

namespace xylreg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidTrainCount: return "InvalidTrainCount";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::InvalidHiddenCount: return "InvalidHiddenCount";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::EmptyRows: return "EmptyRows";
    case ErrorCode::BadArchive: return "BadArchive";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace xylreg
