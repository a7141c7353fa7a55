#include "bido/rp_service.hpp"

#include <httplib.h>

#include "bido/base64url.hpp"
#include "bido/error.hpp"

namespace bido {
namespace {

nlohmann::json challenge_json(const Challenge& c) {
  return {{"challenge", base64url_encode(c.nonce)}, {"ttl_seconds", c.ttl.count()}};
}

Challenge challenge_from_json(const nlohmann::json& j, ChallengePurpose purpose) {
  if (!j.contains("challenge") || !j["challenge"].is_string()) {
    throw Error(Errc::kParseError, "response lacks 'challenge'");
  }
  Challenge c;
  c.nonce = nonce_from_bytes(base64url_decode(j["challenge"].get<std::string>()));
  c.issued_at = Clock::now();
  c.ttl = std::chrono::seconds(j.value("ttl_seconds", 120));
  c.purpose = purpose;
  return c;
}

nlohmann::json error_body(Errc code, const std::string& detail) {
  return {{"error", std::string(to_string(code))}, {"detail", detail}};
}

}  // namespace

nlohmann::json RpJsonApi::register_challenge() {
  return challenge_json(rp_.issue_challenge(ChallengePurpose::kRegistration));
}

nlohmann::json RpJsonApi::register_complete(const nlohmann::json& body) {
  const RegistrationMessage msg = registration_from_json(body);
  const AuthData data = [&] {
    try {
      return parse_auth_data(msg.auth_data);
    } catch (const Error& e) {
      throw Error(Errc::kBadAttestation, e.detail());
    }
  }();
  const CredentialRecord rec = rp_.register_credential(msg, data.nonce);
  return {{"cred_id", base64url_encode(rec.cred_id)}};
}

nlohmann::json RpJsonApi::auth_challenge(const nlohmann::json& body) {
  std::optional<std::vector<std::uint8_t>> cred;
  if (body.is_object() && body.contains("cred_id") && !body["cred_id"].is_null()) {
    if (!body["cred_id"].is_string()) throw Error(Errc::kParseError, "cred_id must be a string");
    cred = base64url_decode(body["cred_id"].get<std::string>());
  }
  auto allow = cred ? rp_.allow_credentials(std::span<const std::uint8_t>(*cred))
                    : rp_.allow_credentials();
  nlohmann::json out = challenge_json(rp_.issue_challenge(ChallengePurpose::kAuthentication));
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : allow) list.push_back(base64url_encode(c));
  out["allow_credentials"] = std::move(list);
  return out;
}

nlohmann::json RpJsonApi::auth_complete(const nlohmann::json& body) {
  Nonce nonce{};
  const AssertionMessage msg = assertion_from_json(body, &nonce);
  rp_.finish_authentication(msg, nonce);
  return {{"accepted", true}};
}

int http_status_for(Errc code) {
  switch (code) {
    case Errc::kParseError:
    case Errc::kInvalidArgument: return 400;
    case Errc::kBadAttestation:
    case Errc::kBadAssertion: return 401;
    case Errc::kUnknownCredential: return 404;
    case Errc::kDuplicateCredential:
    case Errc::kChallengeMismatch:
    case Errc::kChallengeReplayed:
    case Errc::kChallengeExpired: return 409;
    default: return 500;
  }
}

RpHttpServer::RpHttpServer(RelyingParty& rp)
    : api_(rp), server_(std::make_unique<httplib::Server>()) {
  using Handler = nlohmann::json (*)(RpJsonApi&, const nlohmann::json&);
  auto route = [this](const char* path, Handler handler, bool is_auth_complete) {
    server_->Post(path, [this, handler, is_auth_complete](const httplib::Request& req,
                                                          httplib::Response& res) {
      nlohmann::json out;
      try {
        const nlohmann::json body =
            req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
        out = handler(api_, body);
        res.status = 200;
      } catch (const nlohmann::json::exception& e) {
        out = error_body(Errc::kParseError, e.what());
        res.status = 400;
      } catch (const Error& e) {
        out = error_body(e.code(), e.detail());
        if (is_auth_complete) out["accepted"] = false;
        res.status = http_status_for(e.code());
      }
      res.set_content(out.dump(), "application/json");
    });
  };
  route("/register/challenge",
        [](RpJsonApi& api, const nlohmann::json&) { return api.register_challenge(); }, false);
  route("/register/complete",
        [](RpJsonApi& api, const nlohmann::json& b) { return api.register_complete(b); }, false);
  route("/auth/challenge",
        [](RpJsonApi& api, const nlohmann::json& b) { return api.auth_challenge(b); }, false);
  route("/auth/complete",
        [](RpJsonApi& api, const nlohmann::json& b) { return api.auth_complete(b); }, true);
}

RpHttpServer::~RpHttpServer() { stop(); }

int RpHttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(Errc::kIoError, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(Errc::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void RpHttpServer::serve() { server_->listen_after_bind(); }

void RpHttpServer::stop() {
  if (server_) server_->stop();
}

Challenge LocalRpEndpoint::registration_challenge() {
  return rp_.issue_challenge(ChallengePurpose::kRegistration);
}

std::vector<std::uint8_t> LocalRpEndpoint::complete_registration(const RegistrationMessage& msg) {
  const AuthData data = parse_auth_data(msg.auth_data);
  return rp_.register_credential(msg, data.nonce).cred_id;
}

AuthChallenge LocalRpEndpoint::authentication_challenge(
    std::optional<std::vector<std::uint8_t>> cred_id) {
  AuthChallenge out;
  out.allow_credentials = cred_id ? rp_.allow_credentials(std::span<const std::uint8_t>(*cred_id))
                                  : rp_.allow_credentials();
  out.challenge = rp_.issue_challenge(ChallengePurpose::kAuthentication);
  return out;
}

void LocalRpEndpoint::complete_authentication(const AssertionMessage& msg,
                                              const Nonce& challenge) {
  rp_.finish_authentication(msg, challenge);
}

nlohmann::json HttpRpEndpoint::post(const std::string& path, const nlohmann::json& body) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::kTransportError,
                "POST " + base_url_ + path + " failed: " + httplib::to_string(res.error()));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kTransportError, "non-JSON response from " + path);
  }
  if (res->status != 200 || (j.is_object() && j.contains("error"))) {
    const std::string name = j.value("error", "TransportError");
    const Errc code = errc_from_string(name).value_or(Errc::kTransportError);
    throw Error(code, j.value("detail", name));
  }
  return j;
}

Challenge HttpRpEndpoint::registration_challenge() {
  return challenge_from_json(post("/register/challenge", nlohmann::json::object()),
                             ChallengePurpose::kRegistration);
}

std::vector<std::uint8_t> HttpRpEndpoint::complete_registration(const RegistrationMessage& msg) {
  const auto j = post("/register/complete", to_json(msg));
  return base64url_decode(j.at("cred_id").get<std::string>());
}

AuthChallenge HttpRpEndpoint::authentication_challenge(
    std::optional<std::vector<std::uint8_t>> cred_id) {
  nlohmann::json body = nlohmann::json::object();
  if (cred_id) body["cred_id"] = base64url_encode(*cred_id);
  const auto j = post("/auth/challenge", body);
  AuthChallenge out;
  out.challenge = challenge_from_json(j, ChallengePurpose::kAuthentication);
  for (const auto& c : j.at("allow_credentials")) {
    out.allow_credentials.push_back(base64url_decode(c.get<std::string>()));
  }
  return out;
}

void HttpRpEndpoint::complete_authentication(const AssertionMessage& msg,
                                             const Nonce& challenge) {
  const auto j = post("/auth/complete", to_json(msg, challenge));
  if (!j.value("accepted", false)) throw Error(Errc::kBadAssertion, "assertion rejected");
}

}  // namespace bido
