#include "spamlab/errors.hpp"

#include <string>

namespace spamlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingPath: return "MissingPath";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MalformedAddress: return "MalformedAddress";
    case ErrorCode::EmptyDictionary: return "EmptyDictionary";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::WrapperCrashed: return "WrapperCrashed";
    case ErrorCode::TrainerFailed: return "TrainerFailed";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NoSpamEvaluated: return "NoSpamEvaluated";
    case ErrorCode::NoHamEvaluated: return "NoHamEvaluated";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::CorpusMissing: return "CorpusMissing";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace spamlab
