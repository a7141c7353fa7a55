#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "bido/config.hpp"
#include "bido/geometry.hpp"
#include "bido/secure_buffer.hpp"

namespace bido {

using DistanceVector = Eigen::Matrix<double, kProminentCount, 1>;
using QuantizedValues = std::array<std::uint8_t, kProminentCount>;

// Distances of the prominent landmarks from the canonical midpoint (100,70),
// in prominent-index order.
DistanceVector distance_vector(const AlignedFrame& aligned,
                               const ProminentSet& prominent);

// floor(distance / q), clamped to 255. Throws Error(kInvalidArgument) if q < 1.
QuantizedValues quantize(const DistanceVector& distances, int q);

// The salted byte array: 27 value bytes followed by the salt's bytes, used
// verbatim. Wiped on destruction.
class QuantizedVector {
 public:
  QuantizedVector(const QuantizedValues& values, std::string_view salt);

  std::span<const std::uint8_t> packed() const { return packed_; }
  std::span<const std::uint8_t> values() const {
    return std::span(packed_).first(kProminentCount);
  }
  std::span<const std::uint8_t> salt_bytes() const {
    return std::span(packed_).subspan(kProminentCount);
  }
  void zeroize() noexcept { bido::zeroize(packed_); }

 private:
  SecureBytes packed_;
};

// SHA-256 over the packed byte array.
Digest salted_hash(const QuantizedValues& values, std::string_view salt);

// Modal digest; ties go to the lexicographically smallest. Throws
// Error(kEmptyVote) on empty input.
Digest majority_vote(std::span<const Digest> digests);

using FrameDigestResult = std::variant<Digest, Rejection>;

FrameDigestResult frame_digest(const LandmarkFrame& frame, std::string_view salt,
                               const ProminentSet& prominent, int q,
                               int tolerance_px = 0);

inline FrameDigestResult frame_digest(const LandmarkFrame& frame,
                                      std::string_view salt,
                                      const PipelineConfig& config) {
  return frame_digest(frame, salt, config.prominent, config.q,
                      config.frontality_tolerance_px);
}

}  // namespace bido
