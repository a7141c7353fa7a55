#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bido/config.hpp"
#include "bido/geometry.hpp"
#include "bido/keymat.hpp"
#include "bido/landmark_io.hpp"

namespace bido {

inline constexpr std::size_t kNonceSize = 32;
using Nonce = std::array<std::uint8_t, kNonceSize>;
using Clock = std::chrono::system_clock;

enum class ChallengePurpose { kRegistration, kAuthentication };

std::string_view to_string(ChallengePurpose p);

struct Challenge {
  Nonce nonce{};
  Clock::time_point issued_at{};
  std::chrono::seconds ttl{120};
  ChallengePurpose purpose = ChallengePurpose::kRegistration;
  bool consumed = false;

  bool expired(Clock::time_point now) const { return now >= issued_at + ttl; }
};

// --- frame sources ---------------------------------------------------------

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  // std::nullopt once the source is exhausted.
  virtual std::optional<LandmarkFrame> next() = 0;
};

class VectorFrameSource : public FrameSource {
 public:
  explicit VectorFrameSource(std::span<const LandmarkFrame> frames) : frames_(frames) {}
  std::optional<LandmarkFrame> next() override;

 private:
  std::span<const LandmarkFrame> frames_;
  std::size_t pos_ = 0;
};

class StreamFrameSource : public FrameSource {
 public:
  explicit StreamFrameSource(std::istream& in) : reader_(in) {}
  std::optional<LandmarkFrame> next() override { return reader_.next(); }

 private:
  JsonlFrameReader reader_;
};

class GeneratorFrameSource : public FrameSource {
 public:
  explicit GeneratorFrameSource(std::function<std::optional<LandmarkFrame>()> gen)
      : gen_(std::move(gen)) {}
  std::optional<LandmarkFrame> next() override { return gen_(); }

 private:
  std::function<std::optional<LandmarkFrame>()> gen_;
};

// --- messages --------------------------------------------------------------

// auth_data = challenge nonce (32) || CredId wire (70) || public key (65).
inline constexpr std::size_t kAuthDataSize = kNonceSize + kCredIdSize + kPublicKeySize;

struct AuthData {
  Nonce nonce{};
  std::vector<std::uint8_t> cred_id;
  PublicKey public_key{};
};

std::vector<std::uint8_t> build_auth_data(const Nonce& nonce,
                                          std::span<const std::uint8_t> cred_id,
                                          const PublicKey& public_key);
// Throws Error(kParseError) when the layout is wrong.
AuthData parse_auth_data(std::span<const std::uint8_t> auth_data);

struct RegistrationMessage {
  std::vector<std::uint8_t> auth_data;
  Signature attestation;

  friend bool operator==(const RegistrationMessage&, const RegistrationMessage&) = default;
};

struct AssertionMessage {
  std::vector<std::uint8_t> cred_id;
  Signature signed_challenge;
};

nlohmann::ordered_json to_json(const RegistrationMessage& msg);
RegistrationMessage registration_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AssertionMessage& msg, const Nonce& challenge);
AssertionMessage assertion_from_json(const nlohmann::json& j, Nonce* challenge = nullptr);
Nonce nonce_from_bytes(std::span<const std::uint8_t> bytes);

// --- client ceremonies -----------------------------------------------------

struct CeremonyStats {
  int frames_read = 0;
  int frames_rejected = 0;
  int valid_frames = 0;
};

struct EnrolledCredential {
  CredId cred_id;
  PublicKey public_key{};
};

// Collects `config.enroll_frames` valid digests, votes, and derives the
// credential. Every secret is wiped before return. Throws
// Error(kFrameSourceExhausted).
EnrolledCredential derive_credential(FrameSource& frames, std::string_view salt,
                                     const PipelineConfig& config,
                                     CeremonyStats* stats = nullptr);

// Frame-by-frame key recovery against a stripped CredId signature. Returns
// the matching key pair; candidates from failed frames are wiped. Throws
// Error(kAuthTimeout) after `config.auth_max_frames` valid frames and
// Error(kFrameSourceExhausted) if the source ends first.
KeyPair recover_key(FrameSource& frames, std::string_view salt,
                    const Signature& signed_vconst, const PipelineConfig& config,
                    CeremonyStats* stats = nullptr);

RegistrationMessage enroll(FrameSource& frames, std::string_view salt,
                           const Challenge& challenge, const PipelineConfig& config,
                           CeremonyStats* stats = nullptr);

AssertionMessage authenticate(FrameSource& frames, std::string_view salt,
                              const Challenge& challenge,
                              std::span<const std::vector<std::uint8_t>> allow_credentials,
                              const PipelineConfig& config,
                              CeremonyStats* stats = nullptr);

}  // namespace bido
