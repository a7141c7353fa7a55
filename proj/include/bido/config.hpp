#pragma once

#include <array>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace bido {

inline constexpr std::size_t kProminentCount = 27;

// The 27 landmarks whose distances from the canonical midpoint form the
// quantized vector. Strictly increasing, each in [0, 67].
class ProminentSet {
 public:
  // chin, brows, nose bridge/tip/wings, periocular, lip corners and
  // midpoints, jaw flanks, inner lip.
  static ProminentSet defaults();

  // Throws Error(kInvalidArgument) unless the indices satisfy the invariant.
  explicit ProminentSet(std::span<const int> indices);

  std::span<const int, kProminentCount> indices() const { return indices_; }

  friend bool operator==(const ProminentSet&, const ProminentSet&) = default;

 private:
  std::array<int, kProminentCount> indices_{};
};

struct PipelineConfig {
  int q = 8;
  ProminentSet prominent = ProminentSet::defaults();
  int frontality_tolerance_px = 0;
  int enroll_frames = 200;
  int auth_max_frames = 200;

  void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& config);
// Missing keys keep their defaults; unknown keys and bad values are
// Error(kParseError).
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);

}  // namespace bido
