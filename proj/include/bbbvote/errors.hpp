#pragma once

#include <stdexcept>
#include <string>

namespace bbbvote {

enum class ErrorCode {
  kPrivacyPrecondition,  // fewer than three participants
  kParameterOverflow,
  kInvalidArgument,
  kChoiceOutOfRange,
  kSelfShare,
  kMalformed,
  kDuplicateShare,
  kUnexpectedShare,
  kTallyInfeasible,
  kNonUniqueTally,
  kParse,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bbbvote
