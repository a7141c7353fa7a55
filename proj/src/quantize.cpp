#include "bido/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bido/error.hpp"
#include "bido/hash.hpp"

namespace bido {

DistanceVector distance_vector(const AlignedFrame& aligned,
                               const ProminentSet& prominent) {
  DistanceVector out;
  const auto idx = prominent.indices();
  for (std::size_t i = 0; i < kProminentCount; ++i) {
    const Point p = aligned.landmarks.row(idx[i]).transpose();
    out(static_cast<Eigen::Index>(i)) = (p - aligned.midpoint).norm();
  }
  return out;
}

QuantizedValues quantize(const DistanceVector& distances, int q) {
  if (q < 1) throw Error(Errc::kInvalidArgument, "quantizer divisor must be >= 1");
  QuantizedValues out{};
  for (std::size_t i = 0; i < kProminentCount; ++i) {
    const double bin = std::floor(distances(static_cast<Eigen::Index>(i)) / q);
    out[i] = static_cast<std::uint8_t>(std::clamp(bin, 0.0, 255.0));
  }
  return out;
}

QuantizedVector::QuantizedVector(const QuantizedValues& values,
                                 std::string_view salt) {
  packed_.reserve(kProminentCount + salt.size());
  packed_.insert(packed_.end(), values.begin(), values.end());
  packed_.insert(packed_.end(), salt.begin(), salt.end());
}

Digest salted_hash(const QuantizedValues& values, std::string_view salt) {
  const QuantizedVector b(values, salt);
  return sha256(b.packed());
}

Digest majority_vote(std::span<const Digest> digests) {
  if (digests.empty()) throw Error(Errc::kEmptyVote, "no digests to vote on");
  // std::map iterates in ascending key order, so the first maximum found is
  // the lexicographically smallest modal digest.
  std::map<Digest, std::size_t> counts;
  for (const auto& d : digests) ++counts[d];
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

FrameDigestResult frame_digest(const LandmarkFrame& frame, std::string_view salt,
                               const ProminentSet& prominent, int q,
                               int tolerance_px) {
  auto validated = validate_frame(frame, tolerance_px);
  if (auto* r = std::get_if<Rejection>(&validated)) return *r;
  const auto& aligned = std::get<AlignedFrame>(validated);
  QuantizedValues values = quantize(distance_vector(aligned, prominent), q);
  Digest h = salted_hash(values, salt);
  secure_wipe(values.data(), values.size());
  return h;
}

}  // namespace bido
