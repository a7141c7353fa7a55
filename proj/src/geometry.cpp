#include "bido/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bido/error.hpp"

namespace bido {

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::kNotExactlyOneFace: return "NotExactlyOneFace";
    case Rejection::kDegenerateEyes: return "DegenerateEyes";
    case Rejection::kNotFrontal: return "NotFrontal";
  }
  return "Unknown";
}

EyeCenters eye_centers(const LandmarkFrame& frame) {
  const auto& lm = frame.landmarks;
  const Point left =
      lm.middleRows<kEyeLandmarks>(kLeftEyeFirst).colwise().mean().transpose();
  const Point right =
      lm.middleRows<kEyeLandmarks>(kRightEyeFirst).colwise().mean().transpose();
  return {left, right};
}

EyeGeometry eye_geometry(const Point& left, const Point& right) {
  EyeGeometry g;
  g.left_center = left;
  g.right_center = right;
  g.dx = right.x() - left.x();
  g.dy = right.y() - left.y();
  g.d = std::hypot(g.dx, g.dy);
  // Negated comparison so NaN lands here too.
  if (!(g.d >= kDegenerateEyeDistance) || !std::isfinite(g.d)) {
    throw Error(Errc::kDegenerateEyes, "inter-eye distance below 1e-9 px");
  }
  g.theta = std::atan2(g.dy, g.dx);
  return g;
}

AlignmentTransform alignment_transform(const EyeGeometry& geom) {
  AlignmentTransform t;
  t.alpha = kCanonicalEyeDistance / geom.d;
  t.theta = geom.theta;

  const double a = t.alpha;
  const double c = std::cos(geom.theta);
  const double s = std::sin(geom.theta);
  const Point mid = 0.5 * (geom.left_center + geom.right_center);

  t.m << a * c, a * s, (1.0 - a * c) * mid.x() - a * s * mid.y(),
      -a * s, a * c, a * s * mid.x() + (1.0 - a * c) * mid.y();
  t.canonical_shift = kCanonicalMidpoint - mid;
  return t;
}

AlignedFrame apply_transform(const AlignmentTransform& t,
                             const LandmarkFrame& frame) {
  AlignedFrame out;
  out.frame_id = frame.frame_id;
  const Eigen::RowVector2d offset = (t.m.col(2) + t.canonical_shift).transpose();
  out.landmarks = (frame.landmarks * t.m.leftCols<2>().transpose()).rowwise() + offset;
  out.midpoint = t.canonical_midpoint;
  return out;
}

int eye_span(const AlignedFrame& aligned, int first_index) {
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (int k = first_index; k < first_index + kEyeLandmarks; ++k) {
    const double dist = std::abs(aligned.landmarks(k, 0) - aligned.midpoint.x());
    const int rounded = static_cast<int>(std::lround(dist));
    lo = std::min(lo, rounded);
    hi = std::max(hi, rounded);
  }
  return hi - lo;
}

bool frontality_check(const AlignedFrame& aligned, int tolerance_px) {
  const int left = eye_span(aligned, kLeftEyeFirst);
  const int right = eye_span(aligned, kRightEyeFirst);
  return std::abs(left - right) <= tolerance_px;
}

ValidationResult validate_frame(const LandmarkFrame& frame,
                                int tolerance_px) noexcept {
  if (frame.face_count != 1) return Rejection::kNotExactlyOneFace;
  // A non-finite coordinate is a broken detection, same class as
  // coincident eyes.
  if (!frame.landmarks.allFinite()) return Rejection::kDegenerateEyes;

  const auto [left, right] = eye_centers(frame);
  EyeGeometry geom;
  try {
    geom = eye_geometry(left, right);
  } catch (const Error&) {
    return Rejection::kDegenerateEyes;
  }
  AlignedFrame aligned = apply_transform(alignment_transform(geom), frame);
  // Scale blow-up from near-coincident eyes can overflow to inf; the rounding
  // in eye_span needs finite input.
  if (!aligned.landmarks.allFinite() ||
      aligned.landmarks.cwiseAbs().maxCoeff() > 1e12) {
    return Rejection::kDegenerateEyes;
  }
  if (!frontality_check(aligned, tolerance_px)) return Rejection::kNotFrontal;
  return aligned;
}

}  // namespace bido
