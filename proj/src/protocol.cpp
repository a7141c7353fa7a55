#include "bido/protocol.hpp"

#include <algorithm>

#include "bido/base64url.hpp"
#include "bido/error.hpp"
#include "bido/quantize.hpp"

namespace bido {
namespace {

void check_challenge(const Challenge& c, ChallengePurpose expected) {
  if (c.purpose != expected) {
    throw Error(Errc::kInvalidArgument,
                "challenge purpose is " + std::string(to_string(c.purpose)));
  }
  if (c.consumed) throw Error(Errc::kChallengeReplayed, "challenge already consumed");
  if (c.expired(Clock::now())) throw Error(Errc::kChallengeExpired, "challenge expired");
}

std::vector<std::uint8_t> decode_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw Error(Errc::kParseError, std::string("missing base64url field '") + key + "'");
  }
  return base64url_decode(j[key].get<std::string>());
}

// Pulls frames until one passes the gates; nullopt when the source ends.
std::optional<Digest> next_valid_digest(FrameSource& frames, std::string_view salt,
                                        const PipelineConfig& config,
                                        CeremonyStats& stats) {
  while (auto frame = frames.next()) {
    ++stats.frames_read;
    auto result = frame_digest(*frame, salt, config);
    if (auto* d = std::get_if<Digest>(&result)) {
      ++stats.valid_frames;
      return std::move(*d);
    }
    ++stats.frames_rejected;
  }
  return std::nullopt;
}

// Majority vote over exactly `config.enroll_frames` valid digests. The digest
// list is wiped before return.
Digest collect_vseed(FrameSource& frames, std::string_view salt,
                     const PipelineConfig& config, CeremonyStats& st) {
  std::vector<Digest> digests;
  digests.reserve(static_cast<std::size_t>(config.enroll_frames));
  while (digests.size() < static_cast<std::size_t>(config.enroll_frames)) {
    auto d = next_valid_digest(frames, salt, config, st);
    if (!d) {
      throw Error(Errc::kFrameSourceExhausted,
                  "frame source ended after " + std::to_string(digests.size()) + " of " +
                      std::to_string(config.enroll_frames) + " valid frames");
    }
    digests.push_back(std::move(*d));
  }

  Digest vseed = majority_vote(digests);
  zeroize(digests);
  return vseed;
}

}  // namespace

std::string_view to_string(ChallengePurpose p) {
  return p == ChallengePurpose::kRegistration ? "registration" : "authentication";
}

std::optional<LandmarkFrame> VectorFrameSource::next() {
  if (pos_ >= frames_.size()) return std::nullopt;
  return frames_[pos_++];
}

std::vector<std::uint8_t> build_auth_data(const Nonce& nonce,
                                          std::span<const std::uint8_t> cred_id,
                                          const PublicKey& public_key) {
  std::vector<std::uint8_t> out;
  out.reserve(kNonceSize + cred_id.size() + public_key.size());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), cred_id.begin(), cred_id.end());
  out.insert(out.end(), public_key.begin(), public_key.end());
  return out;
}

AuthData parse_auth_data(std::span<const std::uint8_t> auth_data) {
  if (auth_data.size() != kAuthDataSize) {
    throw Error(Errc::kParseError, "auth_data must be " + std::to_string(kAuthDataSize) +
                                       " bytes, got " + std::to_string(auth_data.size()));
  }
  AuthData out;
  std::copy_n(auth_data.begin(), kNonceSize, out.nonce.begin());
  const auto cred = auth_data.subspan(kNonceSize, kCredIdSize);
  out.cred_id.assign(cred.begin(), cred.end());
  const auto pub = auth_data.subspan(kNonceSize + kCredIdSize);
  std::copy(pub.begin(), pub.end(), out.public_key.begin());
  return out;
}

Nonce nonce_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kNonceSize) throw Error(Errc::kParseError, "challenge must be 32 bytes");
  Nonce n{};
  std::copy(bytes.begin(), bytes.end(), n.begin());
  return n;
}

nlohmann::ordered_json to_json(const RegistrationMessage& msg) {
  return {{"auth_data", base64url_encode(msg.auth_data)},
          {"attestation", base64url_encode(msg.attestation.bytes)}};
}

RegistrationMessage registration_from_json(const nlohmann::json& j) {
  RegistrationMessage msg;
  msg.auth_data = decode_field(j, "auth_data");
  const auto att = decode_field(j, "attestation");
  if (att.size() != kSignatureSize) throw Error(Errc::kParseError, "attestation must be 64 bytes");
  msg.attestation = Signature::from_bytes(att);
  return msg;
}

nlohmann::ordered_json to_json(const AssertionMessage& msg, const Nonce& challenge) {
  return {{"cred_id", base64url_encode(msg.cred_id)},
          {"signed_challenge", base64url_encode(msg.signed_challenge.bytes)},
          {"challenge", base64url_encode(challenge)}};
}

AssertionMessage assertion_from_json(const nlohmann::json& j, Nonce* challenge) {
  AssertionMessage msg;
  msg.cred_id = decode_field(j, "cred_id");
  const auto sig = decode_field(j, "signed_challenge");
  if (sig.size() != kSignatureSize) {
    throw Error(Errc::kParseError, "signed_challenge must be 64 bytes");
  }
  msg.signed_challenge = Signature::from_bytes(sig);
  if (challenge != nullptr) *challenge = nonce_from_bytes(decode_field(j, "challenge"));
  return msg;
}

EnrolledCredential derive_credential(FrameSource& frames, std::string_view salt,
                                     const PipelineConfig& config, CeremonyStats* stats) {
  config.validate();
  CeremonyStats local;
  CeremonyStats& st = stats != nullptr ? *stats : local;

  Digest vseed = collect_vseed(frames, salt, config, st);
  KeyPair key = KeyPair::from_seed(vseed);
  vseed.zeroize();

  EnrolledCredential out{make_cred_id(key), key.public_key()};
  key.zeroize();
  return out;
}

KeyPair recover_key(FrameSource& frames, std::string_view salt,
                    const Signature& signed_vconst, const PipelineConfig& config,
                    CeremonyStats* stats) {
  config.validate();
  CeremonyStats local;
  CeremonyStats& st = stats != nullptr ? *stats : local;

  for (int attempts = 0; attempts < config.auth_max_frames; ++attempts) {
    auto candidate_seed = next_valid_digest(frames, salt, config, st);
    if (!candidate_seed) {
      throw Error(Errc::kFrameSourceExhausted,
                  "frame source ended after " + std::to_string(attempts) + " valid frames");
    }
    KeyPair candidate = KeyPair::from_seed(*candidate_seed);
    candidate_seed->zeroize();
    if (verify(candidate.public_key(), as_bytes(kVconst), signed_vconst)) {
      return candidate;
    }
    candidate.zeroize();
  }
  throw Error(Errc::kAuthTimeout, "no key match within " +
                                      std::to_string(config.auth_max_frames) +
                                      " valid frames");
}

RegistrationMessage enroll(FrameSource& frames, std::string_view salt,
                           const Challenge& challenge, const PipelineConfig& config,
                           CeremonyStats* stats) {
  check_challenge(challenge, ChallengePurpose::kRegistration);
  config.validate();
  CeremonyStats local;
  CeremonyStats& st = stats != nullptr ? *stats : local;

  Digest vseed = collect_vseed(frames, salt, config, st);
  KeyPair key = KeyPair::from_seed(vseed);
  const CredId cred = make_cred_id(key);

  RegistrationMessage msg;
  msg.auth_data = build_auth_data(challenge.nonce, cred.wire(), key.public_key());
  msg.attestation = sign(key, msg.auth_data);

  zeroize(key);
  zeroize(vseed);
  return msg;
}

AssertionMessage authenticate(FrameSource& frames, std::string_view salt,
                              const Challenge& challenge,
                              std::span<const std::vector<std::uint8_t>> allow_credentials,
                              const PipelineConfig& config, CeremonyStats* stats) {
  check_challenge(challenge, ChallengePurpose::kAuthentication);
  const auto it = std::find_if(allow_credentials.begin(), allow_credentials.end(),
                               [](const auto& c) { return has_bido_prefix(c); });
  if (it == allow_credentials.end()) {
    throw Error(Errc::kNoBidoCredential, "allowCredentials holds no BIDO1: entry");
  }
  const Signature signed_vconst = split_cred_id(*it);

  KeyPair key = recover_key(frames, salt, signed_vconst, config, stats);
  AssertionMessage out{*it, sign(key, challenge.nonce)};
  zeroize(key);
  return out;
}

}  // namespace bido
