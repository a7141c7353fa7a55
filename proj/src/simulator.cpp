#include "bido/simulator.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "bido/config.hpp"
#include "bido/error.hpp"
#include "bido/landmark_io.hpp"

namespace bido {
namespace {

// Left-eye landmark -> its mirror partner in the right eye.
constexpr std::array<std::pair<int, int>, 6> kEyeMirror = {
    {{36, 45}, {37, 44}, {38, 43}, {39, 42}, {40, 47}, {41, 46}}};

constexpr double kBoundaryMargin = 1e-6;
const Point kTemplateCentre{100.0, 100.0};

bool is_eye(int k) { return k >= kLeftEyeFirst && k < kRightEyeFirst + kEyeLandmarks; }

double distance_to_nearest(double v, double offset) {
  const double shifted = v - offset;
  return std::abs(shifted - std::round(shifted));
}

bool clear_of_boundaries(const Landmarks& lm) {
  LandmarkFrame f;
  f.landmarks = lm;
  const auto result = validate_frame(f);
  const auto* aligned = std::get_if<AlignedFrame>(&result);
  if (aligned == nullptr) return false;
  for (int k : ProminentSet::defaults().indices()) {
    const double d = (aligned->landmarks.row(k).transpose() - kCanonicalMidpoint).norm();
    if (distance_to_nearest(d, 0.0) < kBoundaryMargin) return false;
  }
  for (int k = kLeftEyeFirst; k < kRightEyeFirst + kEyeLandmarks; ++k) {
    const double dx = std::abs(aligned->landmarks(k, 0) - kCanonicalMidpoint.x());
    if (distance_to_nearest(dx, 0.5) < kBoundaryMargin) return false;
  }
  return true;
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  std::uint64_t z = parent + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void NoiseConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!(jitter_sigma_px >= 0.0)) throw Error(Errc::kInvalidArgument, "jitter must be >= 0");
  if (!(pose_rotation_max_rad >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "rotation bound must be >= 0");
  }
  if (!(pose_scale_min > 0.0) || !(pose_scale_max >= pose_scale_min)) {
    throw Error(Errc::kInvalidArgument, "scale range must satisfy 0 < min <= max");
  }
  if (!(pose_translation_max_px >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "translation bound must be >= 0");
  }
  if (!prob(invalid_frame_rate) || !prob(nonfrontal_rate)) {
    throw Error(Errc::kInvalidArgument, "rates must be in [0, 1]");
  }
}

SubjectTemplate new_subject(std::uint64_t rng_seed, double spread_px, std::string subject_id) {
  if (!(spread_px >= 0.0)) throw Error(Errc::kInvalidArgument, "spread must be >= 0");
  SubjectTemplate s;
  s.rng_seed = rng_seed;
  s.subject_id = subject_id.empty() ? "subject-" + std::to_string(rng_seed) : std::move(subject_id);
  s.base_landmarks = mean_face();
  if (spread_px == 0.0) return s;

  Rng rng(rng_seed);
  for (;;) {
    Landmarks lm = mean_face();
    for (int k = 0; k < kLandmarkCount; ++k) {
      if (is_eye(k)) continue;
      lm(k, 0) += rng.uniform(-spread_px, spread_px);
      lm(k, 1) += rng.uniform(-spread_px, spread_px);
    }
    for (auto [left, right] : kEyeMirror) {
      const double ox = rng.uniform(-spread_px, spread_px);
      const double oy = rng.uniform(-spread_px, spread_px);
      lm(left, 0) += ox;
      lm(left, 1) += oy;
      lm(right, 0) -= ox;
      lm(right, 1) += oy;
    }
    if (clear_of_boundaries(lm)) {
      s.base_landmarks = lm;
      return s;
    }
  }
}

LandmarkFrame template_frame(const SubjectTemplate& subject) {
  LandmarkFrame f;
  f.subject_id = subject.subject_id;
  f.frame_id = 0;
  f.face_count = 1;
  f.width = 200;
  f.height = 200;
  f.landmarks = subject.base_landmarks;
  return f;
}

LandmarkFrame render_frame(const SubjectTemplate& subject, const NoiseConfig& noise,
                           std::int64_t frame_id, Rng& rng) {
  // Draw order is part of the reproducibility contract; append, don't
  // reorder.
  const bool invalid = rng.bernoulli(noise.invalid_frame_rate);
  const bool two_faces = rng.bernoulli(0.5);
  const bool nonfrontal = rng.bernoulli(noise.nonfrontal_rate);
  const bool collapse = rng.bernoulli(0.125);
  const bool perturb_left = rng.bernoulli(0.5);
  const double push = rng.uniform(4.0, 8.0);
  const double phi = rng.uniform(-noise.pose_rotation_max_rad, noise.pose_rotation_max_rad);
  const double scale = rng.uniform(noise.pose_scale_min, noise.pose_scale_max);
  const double tx = rng.uniform(-noise.pose_translation_max_px, noise.pose_translation_max_px);
  const double ty = rng.uniform(-noise.pose_translation_max_px, noise.pose_translation_max_px);

  Landmarks lm = subject.base_landmarks;

  if (noise.jitter_sigma_px > 0.0) {
    // Jitter is specified in raw pixels; apply it pre-pose at template scale.
    const double sigma = noise.jitter_sigma_px / scale;
    for (int k = 0; k < kLandmarkCount; ++k) {
      if (is_eye(k)) continue;
      lm(k, 0) += sigma * rng.normal();
      lm(k, 1) += sigma * rng.normal();
    }
    for (auto [left, right] : kEyeMirror) {
      const double ex = sigma * rng.normal();
      const double ey = sigma * rng.normal();
      lm(left, 0) += ex;
      lm(left, 1) += ey;
      lm(right, 0) -= ex;
      lm(right, 1) += ey;
    }
  }

  if (nonfrontal) {
    if (collapse) {
      // Extreme yaw: both eyes project onto one point.
      const Eigen::RowVector2d centre =
          lm.middleRows<2 * kEyeLandmarks>(kLeftEyeFirst).colwise().mean();
      for (int k = kLeftEyeFirst; k < kRightEyeFirst + kEyeLandmarks; ++k) lm.row(k) = centre;
    } else if (perturb_left) {
      lm(36, 0) -= push;
    } else {
      lm(45, 0) += push;
    }
  }

  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const Eigen::RowVector2d image_centre(kSimImageWidth / 2.0 + tx, kSimImageHeight / 2.0 + ty);
  Landmarks raw = ((lm.rowwise() - kTemplateCentre.transpose()) * (scale * rot).transpose())
                      .rowwise() +
                  image_centre;

  LandmarkFrame f;
  f.subject_id = subject.subject_id;
  f.frame_id = frame_id;
  f.face_count = invalid ? (two_faces ? 2 : 0) : 1;
  f.width = kSimImageWidth;
  f.height = kSimImageHeight;
  f.landmarks = raw;
  return f;
}

std::vector<LandmarkFrame> render_frames(const SubjectTemplate& subject,
                                         const NoiseConfig& noise, int count,
                                         std::uint64_t stream_seed) {
  noise.validate();
  Rng rng(stream_seed);
  std::vector<LandmarkFrame> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int j = 0; j < count; ++j) out.push_back(render_frame(subject, noise, j, rng));
  return out;
}

SubjectTemplate dataset_subject(const DatasetSpec& spec, int index) {
  char id[32];
  std::snprintf(id, sizeof id, "subject-%04d", index);
  return new_subject(derive_seed(spec.master_seed, static_cast<std::uint64_t>(index)),
                     spec.spread_px, id);
}

std::vector<LandmarkFrame> generate_frames(const DatasetSpec& spec) {
  if (spec.n_subjects < 1 || spec.frames_per_subject < 1) {
    throw Error(Errc::kInvalidArgument, "subject and frame counts must be positive");
  }
  spec.noise.validate();
  std::vector<LandmarkFrame> out;
  for (int i = 0; i < spec.n_subjects; ++i) {
    const SubjectTemplate subject = dataset_subject(spec, i);
    auto frames = render_frames(subject, spec.noise, spec.frames_per_subject,
                                derive_seed(subject.rng_seed, spec.stream));
    out.insert(out.end(), std::make_move_iterator(frames.begin()),
               std::make_move_iterator(frames.end()));
  }
  return out;
}

void generate_dataset(const DatasetSpec& spec, std::ostream& out) {
  if (spec.n_subjects < 1 || spec.frames_per_subject < 1) {
    throw Error(Errc::kInvalidArgument, "subject and frame counts must be positive");
  }
  spec.noise.validate();
  for (int i = 0; i < spec.n_subjects; ++i) {
    const SubjectTemplate subject = dataset_subject(spec, i);
    Rng rng(derive_seed(subject.rng_seed, spec.stream));
    for (int j = 0; j < spec.frames_per_subject; ++j) {
      out << frame_to_line(render_frame(subject, spec.noise, j, rng)) << '\n';
    }
    if (!out) throw Error(Errc::kIoError, "write failed");
  }
}

}  // namespace bido
