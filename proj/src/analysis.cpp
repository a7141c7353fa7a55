#include "bido/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "bido/error.hpp"
#include "bido/protocol.hpp"
#include "bido/quantize.hpp"

namespace bido {
namespace {

// Genuine or impostor attempt: true iff the frames recover `target`'s key.
bool attempt_recovers(std::span<const LandmarkFrame> frames, const std::string& salt,
                      const CredId& target, const PipelineConfig& config) {
  VectorFrameSource source(frames);
  try {
    KeyPair key = recover_key(source, salt, target.signed_vconst, config);
    key.zeroize();
    return true;
  } catch (const Error& e) {
    if (e.code() == Errc::kAuthTimeout || e.code() == Errc::kFrameSourceExhausted) return false;
    throw;
  }
}

}  // namespace

double min_entropy(const BinHistogram& hist) {
  if (hist.total == 0 || hist.counts.empty()) {
    throw Error(Errc::kEmptyHistogram, "histogram has no samples");
  }
  std::size_t max_count = 0;
  for (const auto& [bin, count] : hist.counts) max_count = std::max(max_count, count);
  const double p = static_cast<double>(max_count) / static_cast<double>(hist.total);
  return p >= 1.0 ? 0.0 : -std::log2(p);
}

double joint_entropy_bound(std::span<const BinHistogram> hists) {
  if (hists.size() != kProminentCount) {
    throw Error(Errc::kInvalidArgument, "joint bound needs exactly 27 histograms");
  }
  double bits = 0.0;
  for (const auto& h : hists) bits += min_entropy(h);
  return bits;
}

double secret_supplement_bits(double joint_bits, double target_bits) {
  return std::max(0.0, target_bits - joint_bits);
}

double collision_probability(double p_bio_per_coord, int n_coords, double p_secret) {
  if (!(p_bio_per_coord >= 0.0 && p_bio_per_coord <= 1.0) ||
      !(p_secret >= 0.0 && p_secret <= 1.0) || n_coords < 0) {
    throw Error(Errc::kInvalidArgument, "probabilities must be in [0,1], n_coords >= 0");
  }
  return std::pow(p_bio_per_coord, n_coords) * p_secret;
}

std::vector<BinHistogram> bin_frequencies(std::span<const LandmarkFrame> representatives,
                                          const PipelineConfig& config) {
  std::vector<BinHistogram> hists(kProminentCount);
  for (std::size_t i = 0; i < kProminentCount; ++i) hists[i].coordinate_index = static_cast<int>(i);
  for (const auto& frame : representatives) {
    const auto result = validate_frame(frame, config.frontality_tolerance_px);
    if (const auto* r = std::get_if<Rejection>(&result)) {
      throw Error(Errc::kInvalidArgument, "representative frame for '" + frame.subject_id +
                                              "' rejected: " + std::string(to_string(*r)));
    }
    const auto q = quantize(distance_vector(std::get<AlignedFrame>(result), config.prominent),
                            config.q);
    for (std::size_t i = 0; i < kProminentCount; ++i) hists[i].add(q[i]);
  }
  return hists;
}

EntropyReport entropy_report(std::span<const LandmarkFrame> representatives,
                             const PipelineConfig& config) {
  const auto hists = bin_frequencies(representatives, config);
  EntropyReport r;
  for (const auto& h : hists) r.per_coord_bits.push_back(min_entropy(h));
  r.joint_bits = joint_entropy_bound(hists);
  r.secret_supplement_bits = secret_supplement_bits(r.joint_bits);
  return r;
}

BindingMetrics binding_metrics(
    std::span<const std::vector<LandmarkFrame>> enroll_streams,
    std::span<const std::vector<std::vector<LandmarkFrame>>> auth_streams,
    std::span<const std::string> salts, const PipelineConfig& config,
    const BindingOptions& options) {
  const std::size_t n = enroll_streams.size();
  if (n == 0 || auth_streams.size() != n || salts.size() != n) {
    throw Error(Errc::kMismatchedInputs, "enroll, auth and salt lists must have equal length");
  }
  const std::size_t attempts = auth_streams[0].size();
  for (const auto& a : auth_streams) {
    if (a.empty() || a.size() != attempts) {
      throw Error(Errc::kMismatchedInputs,
                  "every subject needs the same non-zero number of attempts");
    }
  }

  // A subject whose enrollment stream cannot complete has no credential;
  // its genuine attempts count as rejects.
  std::vector<std::optional<CredId>> creds(n);
  for (std::size_t i = 0; i < n; ++i) {
    VectorFrameSource source(enroll_streams[i]);
    try {
      creds[i] = derive_credential(source, salts[i], config).cred_id;
    } catch (const Error& e) {
      if (e.code() != Errc::kFrameSourceExhausted) throw;
    }
  }

  BindingMetrics m;
  m.n_subjects = static_cast<int>(n);
  m.attempts_per_subject = static_cast<int>(attempts);

  int genuine_ok = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& attempt : auth_streams[i]) {
      ++m.genuine_attempts;
      if (creds[i] && attempt_recovers(attempt, salts[i], *creds[i], config)) ++genuine_ok;
    }
  }

  int far_own = 0;
  int far_victim = 0;
  if (options.impostor_trials && n > 1) {
    for (std::size_t a = 0; a < n; ++a) {
      int victims = 0;
      for (std::size_t step = 1; step < n; ++step) {
        if (options.max_impostor_victims > 0 && victims >= options.max_impostor_victims) break;
        const std::size_t b = (a + step) % n;
        if (!creds[b]) continue;
        ++victims;
        ++m.impostor_attempts;
        const auto& frames = auth_streams[a].front();
        if (attempt_recovers(frames, salts[a], *creds[b], config)) ++far_own;
        if (attempt_recovers(frames, salts[b], *creds[b], config)) ++far_victim;
      }
    }
  }

  m.match_rate = static_cast<double>(genuine_ok) / m.genuine_attempts;
  m.c_frr = 1.0 - m.match_rate;
  if (m.impostor_attempts > 0) {
    m.c_far = static_cast<double>(far_own) / m.impostor_attempts;
    m.c_far_victim_salt = static_cast<double>(far_victim) / m.impostor_attempts;
  }
  return m;
}

nlohmann::ordered_json to_json(const EntropyReport& r) {
  return {{"per_coord_bits", r.per_coord_bits},
          {"joint_bits", r.joint_bits},
          {"secret_supplement_bits", r.secret_supplement_bits}};
}

nlohmann::ordered_json to_json(const BindingMetrics& m) {
  return {{"match_rate", m.match_rate},
          {"c_far", m.c_far},
          {"c_far_victim_salt", m.c_far_victim_salt},
          {"c_frr", m.c_frr},
          {"n_subjects", m.n_subjects},
          {"attempts_per_subject", m.attempts_per_subject},
          {"genuine_attempts", m.genuine_attempts},
          {"impostor_attempts", m.impostor_attempts}};
}

std::string to_table(const EntropyReport& r) {
  std::ostringstream out;
  char line[96];
  out << "coord  min-entropy (bits)\n";
  for (std::size_t i = 0; i < r.per_coord_bits.size(); ++i) {
    std::snprintf(line, sizeof line, "%5zu  %18.4f\n", i, r.per_coord_bits[i]);
    out << line;
  }
  std::snprintf(line, sizeof line, "joint  %18.4f\nsecret %18.4f\n", r.joint_bits,
                r.secret_supplement_bits);
  out << line;
  return out.str();
}

std::string to_table(const BindingMetrics& m) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-22s %10s\n", "metric", "value");
  out << line;
  const std::pair<const char*, double> rows[] = {
      {"match_rate (%)", 100.0 * m.match_rate},
      {"c_far (%)", 100.0 * m.c_far},
      {"c_far_victim_salt (%)", 100.0 * m.c_far_victim_salt},
      {"c_frr (%)", 100.0 * m.c_frr}};
  for (const auto& [name, value] : rows) {
    std::snprintf(line, sizeof line, "%-22s %10.3f\n", name, value);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-22s %10d\n%-22s %10d\n%-22s %10d\n", "subjects",
                m.n_subjects, "genuine attempts", m.genuine_attempts, "impostor attempts",
                m.impostor_attempts);
  out << line;
  return out.str();
}

}  // namespace bido
