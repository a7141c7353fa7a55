#include "bido/relying_party.hpp"

#include <filesystem>
#include <fstream>

#include <openssl/rand.h>

#include "bido/base64url.hpp"
#include "bido/error.hpp"
#include "bido/hash.hpp"

namespace bido {
namespace {

std::string key_of(std::span<const std::uint8_t> cred_id) { return base64url_encode(cred_id); }

}  // namespace

NonceSource system_nonce_source() {
  return [] {
    Nonce n{};
    if (RAND_bytes(n.data(), static_cast<int>(n.size())) != 1) {
      throw Error(Errc::kInvalidArgument, "CSPRNG failure");
    }
    return n;
  };
}

NonceSource seeded_nonce_source(std::uint64_t seed) {
  auto counter = std::make_shared<std::uint64_t>(0);
  return [seed, counter] {
    std::array<std::uint8_t, 16> in{};
    for (int i = 0; i < 8; ++i) {
      in[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
      in[static_cast<std::size_t>(8 + i)] =
          static_cast<std::uint8_t>(*counter >> (56 - 8 * i));
    }
    ++*counter;
    const Digest d = sha256(in);
    Nonce n{};
    std::copy(d.bytes().begin(), d.bytes().end(), n.begin());
    return n;
  };
}

nlohmann::json store_to_json(const std::map<std::string, CredentialRecord>& records) {
  nlohmann::json creds = nlohmann::json::array();
  for (const auto& [key, rec] : records) {
    creds.push_back({{"cred_id", key},
                     {"public_key", base64url_encode(rec.public_key)},
                     {"registered_at", rec.registered_at},
                     {"sign_count", rec.sign_count}});
  }
  return {{"version", 1}, {"credentials", std::move(creds)}};
}

RelyingParty::RelyingParty(RpOptions options) : options_(std::move(options)) {
  if (!options_.nonces) options_.nonces = system_nonce_source();
  if (!options_.now) options_.now = [] { return Clock::now(); };
  if (!options_.store_path.empty()) load_store();
}

void RelyingParty::load_store() {
  if (!std::filesystem::exists(options_.store_path)) return;
  std::ifstream in(options_.store_path);
  if (!in) throw Error(Errc::kIoError, "cannot open store " + options_.store_path);
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("version").get<int>() != 1) {
      throw Error(Errc::kParseError, "unsupported store version");
    }
    for (const auto& rec : j.at("credentials")) {
      CredentialRecord r;
      r.cred_id = base64url_decode(rec.at("cred_id").get<std::string>());
      const auto pub = base64url_decode(rec.at("public_key").get<std::string>());
      if (pub.size() != kPublicKeySize) throw Error(Errc::kParseError, "bad public key");
      std::copy(pub.begin(), pub.end(), r.public_key.begin());
      r.registered_at = rec.at("registered_at").get<std::int64_t>();
      r.sign_count = rec.at("sign_count").get<std::uint64_t>();
      credentials_[key_of(r.cred_id)] = std::move(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, options_.store_path + ": " + e.what());
  }
}

void RelyingParty::persist_locked() const {
  if (options_.store_path.empty()) return;
  const std::string tmp = options_.store_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write " + tmp);
    out << store_to_json(credentials_).dump(2) << '\n';
    if (!out) throw Error(Errc::kIoError, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, options_.store_path);
}

void RelyingParty::purge_locked(Clock::time_point now) {
  // Consumed entries linger for one extra TTL so late replays still read as
  // replays rather than unknown challenges.
  for (auto it = challenges_.begin(); it != challenges_.end();) {
    if (now >= it->second.issued_at + 2 * it->second.ttl) {
      it = challenges_.erase(it);
    } else {
      ++it;
    }
  }
}

Challenge RelyingParty::issue_challenge(ChallengePurpose purpose) {
  std::lock_guard lock(mu_);
  const auto now = options_.now();
  purge_locked(now);
  Challenge c;
  do {
    c.nonce = options_.nonces();
  } while (challenges_.count(c.nonce) != 0);
  c.issued_at = now;
  c.ttl = options_.ttl;
  c.purpose = purpose;
  challenges_[c.nonce] = c;
  return c;
}

void RelyingParty::consume_challenge_locked(const Nonce& nonce, ChallengePurpose purpose) {
  auto it = challenges_.find(nonce);
  if (it == challenges_.end() || it->second.purpose != purpose) {
    throw Error(Errc::kChallengeMismatch, "no such " + std::string(to_string(purpose)) +
                                              " challenge");
  }
  if (it->second.consumed) throw Error(Errc::kChallengeReplayed, "challenge already used");
  if (it->second.expired(options_.now())) {
    it->second.consumed = true;
    throw Error(Errc::kChallengeExpired, "challenge expired");
  }
  it->second.consumed = true;
}

CredentialRecord RelyingParty::register_credential(const RegistrationMessage& msg,
                                                   const Nonce& challenge_nonce) {
  AuthData data;
  try {
    data = parse_auth_data(msg.auth_data);
  } catch (const Error& e) {
    throw Error(Errc::kBadAttestation, e.detail());
  }
  if (data.nonce != challenge_nonce) {
    throw Error(Errc::kChallengeMismatch, "auth_data is bound to a different challenge");
  }

  std::lock_guard lock(mu_);
  consume_challenge_locked(challenge_nonce, ChallengePurpose::kRegistration);

  try {
    if (!verify(data.public_key, msg.auth_data, msg.attestation)) {
      throw Error(Errc::kBadAttestation, "attestation does not verify");
    }
    const Signature signed_vconst = split_cred_id(data.cred_id);
    if (!verify(data.public_key, as_bytes(kVconst), signed_vconst)) {
      throw Error(Errc::kBadAttestation, "CredId signature does not verify");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::kBadAttestation) throw;
    throw Error(Errc::kBadAttestation, e.detail());
  }

  const std::string key = key_of(data.cred_id);
  if (credentials_.count(key) != 0) {
    throw Error(Errc::kDuplicateCredential, "credential already registered");
  }
  CredentialRecord rec;
  rec.cred_id = data.cred_id;
  rec.public_key = data.public_key;
  rec.registered_at =
      std::chrono::duration_cast<std::chrono::seconds>(options_.now().time_since_epoch())
          .count();
  credentials_[key] = rec;
  persist_locked();
  return rec;
}

void RelyingParty::finish_authentication(const AssertionMessage& msg,
                                         const Nonce& challenge_nonce) {
  std::lock_guard lock(mu_);
  consume_challenge_locked(challenge_nonce, ChallengePurpose::kAuthentication);

  auto it = credentials_.find(key_of(msg.cred_id));
  if (it == credentials_.end()) {
    throw Error(Errc::kUnknownCredential, "credential not registered");
  }
  if (!verify(it->second.public_key, challenge_nonce, msg.signed_challenge)) {
    throw Error(Errc::kBadAssertion, "assertion does not verify");
  }
  ++it->second.sign_count;
  persist_locked();
}

std::vector<std::vector<std::uint8_t>> RelyingParty::allow_credentials(
    std::optional<std::span<const std::uint8_t>> cred_id) const {
  std::lock_guard lock(mu_);
  std::vector<std::vector<std::uint8_t>> out;
  if (cred_id) {
    auto it = credentials_.find(key_of(*cred_id));
    if (it == credentials_.end()) {
      throw Error(Errc::kUnknownCredential, "credential not registered");
    }
    out.push_back(it->second.cred_id);
    return out;
  }
  for (const auto& [key, rec] : credentials_) out.push_back(rec.cred_id);
  return out;
}

std::optional<CredentialRecord> RelyingParty::find_credential(
    std::span<const std::uint8_t> cred_id) const {
  std::lock_guard lock(mu_);
  auto it = credentials_.find(key_of(cred_id));
  if (it == credentials_.end()) return std::nullopt;
  return it->second;
}

bool RelyingParty::delete_credential(std::span<const std::uint8_t> cred_id) {
  std::lock_guard lock(mu_);
  const bool erased = credentials_.erase(key_of(cred_id)) != 0;
  if (erased) persist_locked();
  return erased;
}

std::size_t RelyingParty::credential_count() const {
  std::lock_guard lock(mu_);
  return credentials_.size();
}

}  // namespace bido
