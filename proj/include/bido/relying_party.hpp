#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bido/keymat.hpp"
#include "bido/protocol.hpp"

namespace bido {

struct CredentialRecord {
  std::vector<std::uint8_t> cred_id;
  PublicKey public_key{};
  std::int64_t registered_at = 0;  // unix seconds
  std::uint64_t sign_count = 0;
};

using NonceSource = std::function<Nonce()>;

// 32 bytes from the OpenSSL CSPRNG per call.
NonceSource system_nonce_source();
// SHA-256(seed || counter). Reproducible challenges for demos and tests only.
NonceSource seeded_nonce_source(std::uint64_t seed);

struct RpOptions {
  std::chrono::seconds ttl{120};
  NonceSource nonces = system_nonce_source();
  std::function<Clock::time_point()> now = [] { return Clock::now(); };
  // JSON credential store; empty keeps everything in memory.
  std::string store_path;
};

// Mock relying party: single-use challenge table plus credential registry.
// All public members are safe to call concurrently; challenge check-and-
// consume happens under one lock.
class RelyingParty {
 public:
  explicit RelyingParty(RpOptions options = {});

  Challenge issue_challenge(ChallengePurpose purpose);

  // Errors: kChallengeMismatch, kChallengeReplayed, kChallengeExpired,
  // kBadAttestation, kDuplicateCredential.
  CredentialRecord register_credential(const RegistrationMessage& msg,
                                       const Nonce& challenge_nonce);

  // Errors: kChallengeMismatch, kChallengeReplayed, kChallengeExpired,
  // kUnknownCredential, kBadAssertion.
  void finish_authentication(const AssertionMessage& msg, const Nonce& challenge_nonce);

  // All registered CredIds, or just `cred_id` when given (kUnknownCredential
  // if absent).
  std::vector<std::vector<std::uint8_t>> allow_credentials(
      std::optional<std::span<const std::uint8_t>> cred_id = std::nullopt) const;

  std::optional<CredentialRecord> find_credential(std::span<const std::uint8_t> cred_id) const;
  bool delete_credential(std::span<const std::uint8_t> cred_id);
  std::size_t credential_count() const;

  const RpOptions& options() const { return options_; }

 private:
  void consume_challenge_locked(const Nonce& nonce, ChallengePurpose purpose);
  void purge_locked(Clock::time_point now);
  void load_store();
  void persist_locked() const;

  RpOptions options_;
  mutable std::mutex mu_;
  std::map<Nonce, Challenge> challenges_;
  std::map<std::string, CredentialRecord> credentials_;  // key: base64url cred_id
};

// Store file: {"version": 1, "credentials": [{"cred_id", "public_key",
// "registered_at", "sign_count"}]} with binary fields in base64url.
nlohmann::json store_to_json(const std::map<std::string, CredentialRecord>& records);

}  // namespace bido
