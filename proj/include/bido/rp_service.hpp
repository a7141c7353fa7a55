#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bido/error.hpp"
#include "bido/protocol.hpp"
#include "bido/relying_party.hpp"

namespace httplib {
class Server;
}

namespace bido {

// JSON request handlers behind the HTTP routes. Each returns the response
// body or throws Error; the server turns errors into {error, detail}.
//
//   POST /register/challenge              -> {challenge, ttl_seconds}
//   POST /register/complete {auth_data, attestation} -> {cred_id}
//   POST /auth/challenge {cred_id?}       -> {challenge, ttl_seconds, allow_credentials}
//   POST /auth/complete {cred_id, signed_challenge, challenge} -> {accepted}
class RpJsonApi {
 public:
  explicit RpJsonApi(RelyingParty& rp) : rp_(rp) {}

  nlohmann::json register_challenge();
  nlohmann::json register_complete(const nlohmann::json& body);
  nlohmann::json auth_challenge(const nlohmann::json& body);
  nlohmann::json auth_complete(const nlohmann::json& body);

 private:
  RelyingParty& rp_;
};

int http_status_for(Errc code);

class RpHttpServer {
 public:
  explicit RpHttpServer(RelyingParty& rp);
  ~RpHttpServer();
  RpHttpServer(const RpHttpServer&) = delete;
  RpHttpServer& operator=(const RpHttpServer&) = delete;

  // Port 0 binds an ephemeral port; returns the bound port or throws.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

 private:
  RpJsonApi api_;
  std::unique_ptr<httplib::Server> server_;
};

struct AuthChallenge {
  Challenge challenge;
  std::vector<std::vector<std::uint8_t>> allow_credentials;
};

// Client-side view of a relying party, either in-process or over HTTP.
class RpEndpoint {
 public:
  virtual ~RpEndpoint() = default;
  virtual Challenge registration_challenge() = 0;
  // Returns the registered CredId.
  virtual std::vector<std::uint8_t> complete_registration(const RegistrationMessage& msg) = 0;
  virtual AuthChallenge authentication_challenge(
      std::optional<std::vector<std::uint8_t>> cred_id) = 0;
  // Throws Error with the relying party's rejection code.
  virtual void complete_authentication(const AssertionMessage& msg, const Nonce& challenge) = 0;
};

class LocalRpEndpoint : public RpEndpoint {
 public:
  explicit LocalRpEndpoint(RelyingParty& rp) : rp_(rp) {}
  Challenge registration_challenge() override;
  std::vector<std::uint8_t> complete_registration(const RegistrationMessage& msg) override;
  AuthChallenge authentication_challenge(
      std::optional<std::vector<std::uint8_t>> cred_id) override;
  void complete_authentication(const AssertionMessage& msg, const Nonce& challenge) override;

 private:
  RelyingParty& rp_;
};

// `base_url` like "http://127.0.0.1:8080".
class HttpRpEndpoint : public RpEndpoint {
 public:
  explicit HttpRpEndpoint(std::string base_url) : base_url_(std::move(base_url)) {}
  Challenge registration_challenge() override;
  std::vector<std::uint8_t> complete_registration(const RegistrationMessage& msg) override;
  AuthChallenge authentication_challenge(
      std::optional<std::vector<std::uint8_t>> cred_id) override;
  void complete_authentication(const AssertionMessage& msg, const Nonce& challenge) override;

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  std::string base_url_;
};

}  // namespace bido
