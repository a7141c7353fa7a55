#include "bido/error.hpp"

namespace bido {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kParseError: return "ParseError";
    case Errc::kIoError: return "IoError";
    case Errc::kDegenerateEyes: return "DegenerateEyes";
    case Errc::kEmptyVote: return "EmptyVote";
    case Errc::kKeyZeroized: return "KeyZeroized";
    case Errc::kMalformedPoint: return "MalformedPoint";
    case Errc::kNotBidoCredential: return "NotBidoCredential";
    case Errc::kMalformedCredential: return "MalformedCredential";
    case Errc::kFrameSourceExhausted: return "FrameSourceExhausted";
    case Errc::kNoBidoCredential: return "NoBidoCredential";
    case Errc::kAuthTimeout: return "AuthTimeout";
    case Errc::kChallengeMismatch: return "ChallengeMismatch";
    case Errc::kChallengeReplayed: return "ChallengeReplayed";
    case Errc::kChallengeExpired: return "ChallengeExpired";
    case Errc::kBadAttestation: return "BadAttestation";
    case Errc::kDuplicateCredential: return "DuplicateCredential";
    case Errc::kUnknownCredential: return "UnknownCredential";
    case Errc::kBadAssertion: return "BadAssertion";
    case Errc::kEmptyHistogram: return "EmptyHistogram";
    case Errc::kMismatchedInputs: return "MismatchedInputs";
    case Errc::kTransportError: return "TransportError";
  }
  return "Unknown";
}

std::optional<Errc> errc_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Errc::kTransportError); ++i) {
    const auto code = static_cast<Errc>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace bido
