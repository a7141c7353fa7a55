#include "cli.hpp"

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <termios.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "bido/analysis.hpp"
#include "bido/base64url.hpp"
#include "bido/error.hpp"
#include "bido/landmark_io.hpp"
#include "bido/protocol.hpp"
#include "bido/relying_party.hpp"
#include "bido/rp_service.hpp"
#include "bido/simulator.hpp"

namespace bido::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return kUsage;
    case Errc::kParseError:
    case Errc::kIoError: return kInputError;
    case Errc::kTransportError: return kTransportFailure;
    default: return kCeremonyFailure;
  }
}

// Reads a secret from the controlling terminal with echo disabled.
std::string prompt_secret(const char* prompt) {
  std::FILE* tty = std::fopen("/dev/tty", "r+");
  if (tty == nullptr) throw UsageError("no salt source: pass --salt-env or run on a terminal");
  const int fd = fileno(tty);
  termios old_mode{};
  tcgetattr(fd, &old_mode);
  termios quiet = old_mode;
  quiet.c_lflag &= static_cast<tcflag_t>(~ECHO);
  tcsetattr(fd, TCSAFLUSH, &quiet);
  std::fputs(prompt, tty);
  std::fflush(tty);
  std::string secret;
  for (int ch = std::fgetc(tty); ch != EOF && ch != '\n'; ch = std::fgetc(tty)) {
    secret.push_back(static_cast<char>(ch));
  }
  tcsetattr(fd, TCSAFLUSH, &old_mode);
  std::fputc('\n', tty);
  std::fclose(tty);
  return secret;
}

std::string load_salt(const std::string& env_var) {
  std::string salt;
  if (!env_var.empty()) {
    const char* value = std::getenv(env_var.c_str());
    if (value == nullptr) throw UsageError("environment variable " + env_var + " is not set");
    salt = value;
  } else if (isatty(STDIN_FILENO) != 0) {
    salt = prompt_secret("salt: ");
  } else {
    throw UsageError("no salt source: pass --salt-env VAR");
  }
  if (salt.empty()) throw UsageError("salt must not be empty");
  return salt;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

std::unique_ptr<std::istream> open_input(const std::string& path) {
  if (path == "-") return std::make_unique<std::istream>(std::cin.rdbuf());
  auto in = std::make_unique<std::ifstream>(path);
  if (!*in) throw Error(Errc::kIoError, "cannot open " + path);
  return in;
}

// Groups frames by subject_id, preserving first-seen order.
std::vector<std::pair<std::string, std::vector<LandmarkFrame>>> group_by_subject(
    std::vector<LandmarkFrame> frames) {
  std::vector<std::pair<std::string, std::vector<LandmarkFrame>>> groups;
  std::map<std::string, std::size_t> index;
  for (auto& f : frames) {
    auto [it, inserted] = index.emplace(f.subject_id, groups.size());
    if (inserted) groups.emplace_back(f.subject_id, std::vector<LandmarkFrame>{});
    groups[it->second].second.push_back(std::move(f));
  }
  return groups;
}

std::pair<std::string, int> parse_listen(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects host:port");
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--listen expects host:port");
  }
}

RpHttpServer* g_server = nullptr;
extern "C" void handle_stop_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

struct SimulateArgs {
  int subjects = 1;
  int frames = 200;
  double jitter = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double spread = 6.0;
  NoiseConfig noise;
  std::string out = "-";
};

struct EnrollArgs {
  std::string frames;
  std::string salt_env;
  std::string rp;
  std::string store = "bido-store.json";
  std::string config;
  std::string registration_out;
};

struct AuthArgs {
  std::string frames;
  std::string salt_env;
  std::string cred_id;
  std::string rp;
  std::string store = "bido-store.json";
  std::string config;
};

struct ServeArgs {
  std::string store = "bido-store.json";
  std::string listen = "127.0.0.1:8080";
  int ttl = 120;
};

struct EntropyArgs {
  std::string dataset;
  std::string config;
  std::string format = "json";
};

struct BindingArgs {
  std::string enroll;
  std::string auth;
  std::string config;
  std::string salt_env;
  int attempts = 1;
  std::string format = "json";
};

struct RoundtripArgs {
  std::uint64_t seed = 42;
  std::string config;
  std::string salt_env;
  std::string registration_out;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  DatasetSpec spec;
  spec.n_subjects = a.subjects;
  spec.frames_per_subject = a.frames;
  spec.noise = a.noise;
  spec.noise.jitter_sigma_px = a.jitter;
  spec.master_seed = a.seed;
  spec.stream = a.stream;
  spec.spread_px = a.spread;
  if (a.out == "-") {
    generate_dataset(spec, out);
  } else {
    std::ofstream file(a.out, std::ios::trunc);
    if (!file) throw Error(Errc::kIoError, "cannot write " + a.out);
    generate_dataset(spec, file);
  }
  return kOk;
}

std::unique_ptr<RpEndpoint> make_endpoint(const std::string& url, const std::string& store,
                                          std::unique_ptr<RelyingParty>& local_rp) {
  if (!url.empty()) return std::make_unique<HttpRpEndpoint>(url);
  RpOptions opts;
  opts.store_path = store;
  local_rp = std::make_unique<RelyingParty>(opts);
  return std::make_unique<LocalRpEndpoint>(*local_rp);
}

int do_enroll(const EnrollArgs& a, std::ostream& out) {
  const PipelineConfig config = load_pipeline_config(a.config);
  const std::string salt = load_salt(a.salt_env);
  std::unique_ptr<RelyingParty> local_rp;
  auto rp = make_endpoint(a.rp, a.store, local_rp);

  auto in = open_input(a.frames);
  StreamFrameSource frames(*in);
  const Challenge challenge = rp->registration_challenge();
  const RegistrationMessage msg = enroll(frames, salt, challenge, config);
  const auto cred_id = rp->complete_registration(msg);

  if (!a.registration_out.empty()) {
    std::ofstream file(a.registration_out, std::ios::trunc);
    if (!file) throw Error(Errc::kIoError, "cannot write " + a.registration_out);
    file << to_json(msg).dump() << '\n';
  }
  out << base64url_encode(cred_id) << '\n';
  return kOk;
}

int do_auth(const AuthArgs& a, std::ostream& out) {
  const PipelineConfig config = load_pipeline_config(a.config);
  const std::string salt = load_salt(a.salt_env);
  const auto cred_id = base64url_decode(a.cred_id);
  std::unique_ptr<RelyingParty> local_rp;
  auto rp = make_endpoint(a.rp, a.store, local_rp);

  auto in = open_input(a.frames);
  StreamFrameSource frames(*in);
  const AuthChallenge ac = rp->authentication_challenge(cred_id);
  const AssertionMessage assertion =
      authenticate(frames, salt, ac.challenge, ac.allow_credentials, config);
  rp->complete_authentication(assertion, ac.challenge.nonce);
  out << "accepted\n";
  return kOk;
}

int do_serve(const ServeArgs& a, std::ostream& out) {
  const auto [host, port] = parse_listen(a.listen);
  RpOptions opts;
  opts.store_path = a.store;
  opts.ttl = std::chrono::seconds(a.ttl);
  RelyingParty rp(opts);
  RpHttpServer server(rp);
  const int bound = server.bind(host, port);
  out << "listening on " << host << ":" << bound << std::endl;
  g_server = &server;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  server.serve();
  g_server = nullptr;
  return kOk;
}

int do_entropy(const EntropyArgs& a, std::ostream& out) {
  const PipelineConfig config = load_pipeline_config(a.config);
  auto groups = group_by_subject(read_frames_file(a.dataset));
  std::vector<LandmarkFrame> reps;
  for (auto& [id, frames] : groups) {
    for (auto& f : frames) {
      if (std::holds_alternative<AlignedFrame>(validate_frame(f, config.frontality_tolerance_px))) {
        reps.push_back(std::move(f));
        break;
      }
    }
  }
  const EntropyReport report = entropy_report(reps, config);
  out << (a.format == "table" ? to_table(report) : to_json(report).dump(2) + "\n");
  return kOk;
}

int do_binding(const BindingArgs& a, std::ostream& out) {
  const PipelineConfig config = load_pipeline_config(a.config);
  const std::string base_salt = load_salt(a.salt_env);
  if (a.attempts < 1) throw UsageError("--attempts must be >= 1");

  auto enroll_groups = group_by_subject(read_frames_file(a.enroll));
  auto auth_groups = group_by_subject(read_frames_file(a.auth));
  std::map<std::string, std::vector<LandmarkFrame>> auth_by_id;
  for (auto& [id, frames] : auth_groups) auth_by_id[id] = std::move(frames);

  std::vector<std::vector<LandmarkFrame>> enroll_streams;
  std::vector<std::vector<std::vector<LandmarkFrame>>> auth_streams;
  std::vector<std::string> salts;
  for (auto& [id, frames] : enroll_groups) {
    auto it = auth_by_id.find(id);
    if (it == auth_by_id.end()) {
      throw Error(Errc::kMismatchedInputs, "no authentication frames for " + id);
    }
    const auto& all = it->second;
    const std::size_t chunk = all.size() / static_cast<std::size_t>(a.attempts);
    if (chunk == 0) throw Error(Errc::kMismatchedInputs, "too few authentication frames for " + id);
    std::vector<std::vector<LandmarkFrame>> attempts;
    for (int k = 0; k < a.attempts; ++k) {
      attempts.emplace_back(all.begin() + static_cast<std::ptrdiff_t>(k * chunk),
                            all.begin() + static_cast<std::ptrdiff_t>((k + 1) * chunk));
    }
    enroll_streams.push_back(std::move(frames));
    auth_streams.push_back(std::move(attempts));
    salts.push_back(base_salt + ":" + id);
  }
  const BindingMetrics m = binding_metrics(enroll_streams, auth_streams, salts, config);
  out << (a.format == "table" ? to_table(m) : to_json(m).dump(2) + "\n");
  return kOk;
}

int do_roundtrip(const RoundtripArgs& a, std::ostream& out) {
  const PipelineConfig config = load_pipeline_config(a.config);
  const std::string salt =
      a.salt_env.empty() ? "roundtrip-" + std::to_string(a.seed) : load_salt(a.salt_env);

  DatasetSpec spec;
  spec.n_subjects = 1;
  spec.frames_per_subject = config.enroll_frames;
  spec.master_seed = a.seed;
  spec.noise.pose_rotation_max_rad = 0.3;
  spec.noise.pose_scale_min = 1.5;
  spec.noise.pose_scale_max = 2.5;
  spec.noise.pose_translation_max_px = 40.0;
  const auto enroll_frames = generate_frames(spec);
  spec.stream = 1;
  spec.frames_per_subject = 5;
  const auto auth_frames = generate_frames(spec);

  RpOptions opts;
  opts.nonces = seeded_nonce_source(a.seed);
  RelyingParty rp(opts);

  VectorFrameSource enroll_source(enroll_frames);
  const Challenge reg_challenge = rp.issue_challenge(ChallengePurpose::kRegistration);
  const RegistrationMessage reg = enroll(enroll_source, salt, reg_challenge, config);
  const CredentialRecord rec = rp.register_credential(reg, reg_challenge.nonce);
  if (!a.registration_out.empty()) {
    std::ofstream file(a.registration_out, std::ios::trunc);
    if (!file) throw Error(Errc::kIoError, "cannot write " + a.registration_out);
    file << to_json(reg).dump() << '\n';
  }

  VectorFrameSource auth_source(auth_frames);
  const Challenge auth_challenge = rp.issue_challenge(ChallengePurpose::kAuthentication);
  const auto allow = rp.allow_credentials(std::span<const std::uint8_t>(rec.cred_id));
  try {
    const AssertionMessage assertion = authenticate(auth_source, salt, auth_challenge, allow, config);
    rp.finish_authentication(assertion, auth_challenge.nonce);
  } catch (const Error& e) {
    out << "FAIL " << to_string(e.code()) << '\n';
    return kCeremonyFailure;
  }
  out << "cred_id " << base64url_encode(rec.cred_id) << '\n';
  out << "PASS\n";
  return kOk;
}

void add_config_option(CLI::App* cmd, std::string& target) {
  cmd->add_option("--config", target, "pipeline configuration JSON")->check(CLI::ExistingFile);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--salt" || arg.starts_with("--salt=")) {
      err << "error: --salt is not accepted; pass --salt-env VAR or enter the salt at the prompt\n";
      return kUsage;
    }
  }

  CLI::App app{"Device-free biometric credential toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic landmark frames (JSONL)");
  simulate->add_option("--subjects", sim.subjects)->check(CLI::PositiveNumber);
  simulate->add_option("--frames", sim.frames, "frames per subject")->check(CLI::PositiveNumber);
  simulate->add_option("--jitter", sim.jitter, "landmark jitter sigma, raw px");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--stream", sim.stream, "independent frame stream for the same subjects");
  simulate->add_option("--spread", sim.spread, "inter-subject landmark spread, px");
  simulate->add_option("--rotation", sim.noise.pose_rotation_max_rad, "max pose rotation, rad");
  simulate->add_option("--scale-min", sim.noise.pose_scale_min);
  simulate->add_option("--scale-max", sim.noise.pose_scale_max);
  simulate->add_option("--translation", sim.noise.pose_translation_max_px, "max pose shift, px");
  simulate->add_option("--invalid-rate", sim.noise.invalid_frame_rate);
  simulate->add_option("--nonfrontal-rate", sim.noise.nonfrontal_rate);
  simulate->add_option("--out", sim.out, "output path, '-' for stdout");

  EnrollArgs en;
  auto* enroll_cmd = app.add_subcommand("enroll", "enroll from a frame stream");
  enroll_cmd->add_option("--frames", en.frames, "JSONL frames, '-' for stdin")->required();
  enroll_cmd->add_option("--salt-env", en.salt_env, "environment variable holding the salt");
  enroll_cmd->add_option("--rp", en.rp, "relying party base URL; in-process when omitted");
  enroll_cmd->add_option("--store", en.store, "credential store for the in-process RP");
  enroll_cmd->add_option("--registration-out", en.registration_out);
  add_config_option(enroll_cmd, en.config);

  AuthArgs au;
  auto* auth_cmd = app.add_subcommand("auth", "authenticate from a frame stream");
  auth_cmd->add_option("--frames", au.frames, "JSONL frames, '-' for stdin")->required();
  auth_cmd->add_option("--salt-env", au.salt_env, "environment variable holding the salt");
  auth_cmd->add_option("--cred-id", au.cred_id, "base64url CredId")->required();
  auth_cmd->add_option("--rp", au.rp, "relying party base URL; in-process when omitted");
  auth_cmd->add_option("--store", au.store, "credential store for the in-process RP");
  add_config_option(auth_cmd, au.config);

  ServeArgs sv;
  auto* serve = app.add_subcommand("rp-serve", "run the mock relying party over HTTP");
  serve->add_option("--store", sv.store);
  serve->add_option("--listen", sv.listen, "host:port");
  serve->add_option("--ttl", sv.ttl, "challenge TTL, seconds")->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "entropy and binding analysis");
  analyze->require_subcommand(1);
  EntropyArgs ea;
  auto* entropy = analyze->add_subcommand("entropy", "min-entropy of quantized coordinates");
  entropy->add_option("--dataset", ea.dataset)->required()->check(CLI::ExistingFile);
  entropy->add_option("--format", ea.format)->check(CLI::IsMember({"json", "table"}));
  add_config_option(entropy, ea.config);
  BindingArgs ba;
  auto* binding = analyze->add_subcommand("binding", "match rate, C-FAR and C-FRR");
  binding->add_option("--enroll", ba.enroll)->required()->check(CLI::ExistingFile);
  binding->add_option("--auth", ba.auth)->required()->check(CLI::ExistingFile);
  binding->add_option("--salt-env", ba.salt_env, "base salt; each subject uses <salt>:<subject_id>");
  binding->add_option("--attempts", ba.attempts, "attempts per subject (auth frames are split evenly)");
  binding->add_option("--format", ba.format)->check(CLI::IsMember({"json", "table"}));
  add_config_option(binding, ba.config);

  RoundtripArgs rt;
  auto* roundtrip = app.add_subcommand("roundtrip", "simulate, enroll, authenticate, verify");
  roundtrip->add_option("--seed", rt.seed);
  roundtrip->add_option("--salt-env", rt.salt_env);
  roundtrip->add_option("--registration-out", rt.registration_out);
  add_config_option(roundtrip, rt.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream buf;
    app.exit(e, buf, buf);
    err << buf.str();
    return kUsage;
  }

  try {
    if (*simulate) return do_simulate(sim, out);
    if (*enroll_cmd) return do_enroll(en, out);
    if (*auth_cmd) return do_auth(au, out);
    if (*serve) return do_serve(sv, out);
    if (*entropy) return do_entropy(ea, out);
    if (*binding) return do_binding(ba, out);
    if (*roundtrip) return do_roundtrip(rt, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kUsage;
}

}  // namespace bido::cli
