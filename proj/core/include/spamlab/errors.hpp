#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spamlab {

enum class ErrorCode {
  MissingPath,
  EmptyCorpus,
  MalformedAddress,
  EmptyDictionary,
  CalibrationFailed,
  WrapperCrashed,
  TrainerFailed,
  IoFailure,
  EmptyTrainingSet,
  NoSpamEvaluated,
  NoHamEvaluated,
  ConfigInvalid,
  CorpusMissing,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spamlab
