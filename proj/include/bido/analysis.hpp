#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bido/config.hpp"
#include "bido/geometry.hpp"

namespace bido {

inline constexpr double kAal2SecurityBits = 112.0;

struct BinHistogram {
  int coordinate_index = 0;
  std::map<int, std::size_t> counts;  // quantized bin -> subjects
  std::size_t total = 0;

  void add(int bin) {
    ++counts[bin];
    ++total;
  }
};

// -log2(max_k counts[k] / total). Throws Error(kEmptyHistogram).
double min_entropy(const BinHistogram& hist);

// Independence lower bound: the plain sum of per-coordinate min-entropies.
// Throws Error(kInvalidArgument) unless exactly 27 histograms are given.
double joint_entropy_bound(std::span<const BinHistogram> hists);

// Bits the memorized secret must add to reach `target_bits`; never negative.
double secret_supplement_bits(double joint_bits, double target_bits = kAal2SecurityBits);

// p_bio_per_coord ^ n_coords * p_secret.
double collision_probability(double p_bio_per_coord, int n_coords, double p_secret);

// Per-coordinate histograms of quantized distances, one representative frame
// per subject. Rejected representatives are Error(kInvalidArgument).
std::vector<BinHistogram> bin_frequencies(std::span<const LandmarkFrame> representatives,
                                          const PipelineConfig& config);

struct EntropyReport {
  std::vector<double> per_coord_bits;
  double joint_bits = 0.0;
  double secret_supplement_bits = 0.0;
};

EntropyReport entropy_report(std::span<const LandmarkFrame> representatives,
                             const PipelineConfig& config);

struct BindingMetrics {
  double match_rate = 0.0;
  double c_frr = 0.0;
  // Impostor frames + impostor's own salt against the victim's credential.
  double c_far = 0.0;
  // Impostor frames + the victim's salt; isolates the biometric factor.
  double c_far_victim_salt = 0.0;
  int n_subjects = 0;
  int attempts_per_subject = 0;
  int genuine_attempts = 0;
  int impostor_attempts = 0;
};

struct BindingOptions {
  // Cap on impostor victims per subject; 0 means every other subject.
  int max_impostor_victims = 0;
  bool impostor_trials = true;
};

// enroll_streams[i] enrolls subject i with salts[i]; auth_streams[i] holds
// that subject's genuine attempts. Impostor attempts reuse subject A's first
// attempt against every other subject's credential. Throws
// Error(kMismatchedInputs) when sizes disagree or a subject has no attempts.
BindingMetrics binding_metrics(std::span<const std::vector<LandmarkFrame>> enroll_streams,
                               std::span<const std::vector<std::vector<LandmarkFrame>>> auth_streams,
                               std::span<const std::string> salts, const PipelineConfig& config,
                               const BindingOptions& options = {});

nlohmann::ordered_json to_json(const EntropyReport& r);
nlohmann::ordered_json to_json(const BindingMetrics& m);
std::string to_table(const EntropyReport& r);
std::string to_table(const BindingMetrics& m);

}  // namespace bido
