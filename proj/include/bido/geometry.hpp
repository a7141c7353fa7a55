#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace bido {

inline constexpr int kLandmarkCount = 68;

using Point = Eigen::Vector2d;
// One row per landmark, Dlib 68-point indexing (0-based), columns x and y.
using Landmarks = Eigen::Matrix<double, kLandmarkCount, 2, Eigen::RowMajor>;
using AffineMatrix = Eigen::Matrix<double, 2, 3>;

inline constexpr int kLeftEyeFirst = 36;
inline constexpr int kRightEyeFirst = 42;
inline constexpr int kEyeLandmarks = 6;

inline const Point kCanonicalLeftEye{70.0, 70.0};
inline const Point kCanonicalRightEye{130.0, 70.0};
inline const Point kCanonicalMidpoint{100.0, 70.0};
inline constexpr double kCanonicalEyeDistance = 60.0;
inline constexpr double kDegenerateEyeDistance = 1e-9;

struct LandmarkFrame {
  std::string subject_id;
  std::int64_t frame_id = 0;
  int face_count = 1;
  int width = 640;
  int height = 480;
  Landmarks landmarks = Landmarks::Zero();
};

struct EyeCenters {
  Point left;
  Point right;
};

struct EyeGeometry {
  Point left_center;
  Point right_center;
  double dx = 0.0;
  double dy = 0.0;
  double d = 0.0;
  double theta = 0.0;
};

// Similarity transform that sends the eye centres to (70,70) and (130,70).
// `m` keeps the raw inter-eye midpoint fixed; `canonical_shift` then moves
// that midpoint to (100,70).
struct AlignmentTransform {
  double alpha = 1.0;
  double theta = 0.0;
  AffineMatrix m = AffineMatrix::Zero();
  Eigen::Vector2d canonical_shift = Eigen::Vector2d::Zero();
  Point canonical_midpoint = kCanonicalMidpoint;

  Point apply(const Point& p) const {
    return m.leftCols<2>() * p + m.col(2) + canonical_shift;
  }
};

struct AlignedFrame {
  std::int64_t frame_id = 0;
  Landmarks landmarks = Landmarks::Zero();
  Point midpoint = kCanonicalMidpoint;
};

enum class Rejection { kNotExactlyOneFace, kDegenerateEyes, kNotFrontal };

std::string_view to_string(Rejection r);

using ValidationResult = std::variant<AlignedFrame, Rejection>;

// Means of landmarks 36..41 (left) and 42..47 (right).
EyeCenters eye_centers(const LandmarkFrame& frame);

// Throws Error(kDegenerateEyes) when the eyes are closer than 1e-9 px or the
// geometry is not finite.
EyeGeometry eye_geometry(const Point& left, const Point& right);

AlignmentTransform alignment_transform(const EyeGeometry& geom);

AlignedFrame apply_transform(const AlignmentTransform& t,
                             const LandmarkFrame& frame);

// Horizontal span of one eye in aligned space: max minus min of the rounded
// distances |x - 100| over its six landmarks.
int eye_span(const AlignedFrame& aligned, int first_index);

bool frontality_check(const AlignedFrame& aligned, int tolerance_px = 0);

// Face-count gate, eye geometry, alignment and frontality in that order.
// Never throws.
ValidationResult validate_frame(const LandmarkFrame& frame,
                                int tolerance_px = 0) noexcept;

}  // namespace bido
