#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bido {

// Fault codes shared by every module. Frame-level rejections are not faults
// and live in geometry.hpp as `Rejection`.
enum class Errc {
  kInvalidArgument,
  kParseError,
  kIoError,
  kDegenerateEyes,
  kEmptyVote,
  kKeyZeroized,
  kMalformedPoint,
  kNotBidoCredential,
  kMalformedCredential,
  kFrameSourceExhausted,
  kNoBidoCredential,
  kAuthTimeout,
  kChallengeMismatch,
  kChallengeReplayed,
  kChallengeExpired,
  kBadAttestation,
  kDuplicateCredential,
  kUnknownCredential,
  kBadAssertion,
  kEmptyHistogram,
  kMismatchedInputs,
  kTransportError,
};

std::string_view to_string(Errc code);
std::optional<Errc> errc_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}
  explicit Error(Errc code) : Error(code, std::string(to_string(code))) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace bido
