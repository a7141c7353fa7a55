#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "bido/geometry.hpp"

namespace bido {

// Embedded mean-face template (200x200 box, eyes at (70,70)/(130,70)).
const Landmarks& mean_face();

inline constexpr int kSimImageWidth = 640;
inline constexpr int kSimImageHeight = 480;

// Portable RNG: mt19937_64 output is fixed by the standard, and the
// uniform/normal transforms below are ours, so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // standard normal
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer; derives independent child seeds.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

struct SubjectTemplate {
  std::string subject_id;
  Landmarks base_landmarks = Landmarks::Zero();
  std::uint64_t rng_seed = 0;
};

struct NoiseConfig {
  double jitter_sigma_px = 0.0;  // raw image pixels
  double pose_rotation_max_rad = 0.0;
  double pose_scale_min = 2.0;   // raw pixels per template pixel
  double pose_scale_max = 2.0;
  double pose_translation_max_px = 0.0;
  double invalid_frame_rate = 0.0;
  double nonfrontal_rate = 0.0;

  // Throws Error(kInvalidArgument).
  void validate() const;
};

// Mean face plus per-landmark uniform offsets in [-spread, spread]. Eye
// offsets are mirrored so the noiseless template passes the frontality gate.
// For spread > 0 the draw is repeated until every prominent-landmark distance
// sits at least 1e-6 px from an integer and every eye offset from a
// half-integer, which keeps noiseless digests stable under any pose.
SubjectTemplate new_subject(std::uint64_t rng_seed, double spread_px = 6.0,
                            std::string subject_id = {});

// The template itself as a single-face frame in its 200x200 box.
LandmarkFrame template_frame(const SubjectTemplate& subject);

// Per-frame: optional nonfrontal perturbation (one eye's outer corner pushed
// outward, or with probability 1/8 both eye clusters collapsed onto one
// point), Gaussian jitter (eye jitter mirrored between the eyes), random
// similarity pose, and face_count in {0, 2} with probability
// invalid_frame_rate.
LandmarkFrame render_frame(const SubjectTemplate& subject, const NoiseConfig& noise,
                           std::int64_t frame_id, Rng& rng);

std::vector<LandmarkFrame> render_frames(const SubjectTemplate& subject,
                                         const NoiseConfig& noise, int count,
                                         std::uint64_t stream_seed);

struct DatasetSpec {
  int n_subjects = 1;
  int frames_per_subject = 1;
  NoiseConfig noise;
  std::uint64_t master_seed = 0;
  double spread_px = 6.0;
  // Selects an independent frame stream for the same subjects, so enrollment
  // and authentication files can share a population.
  std::uint64_t stream = 0;
};

SubjectTemplate dataset_subject(const DatasetSpec& spec, int index);
std::vector<LandmarkFrame> generate_frames(const DatasetSpec& spec);
// JSONL, grouped by subject. Throws Error(kIoError) if the stream fails.
void generate_dataset(const DatasetSpec& spec, std::ostream& out);

}  // namespace bido
