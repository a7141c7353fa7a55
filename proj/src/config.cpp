#include "bido/config.hpp"

#include <fstream>

#include "bido/error.hpp"

namespace bido {
namespace {

constexpr std::array<int, kProminentCount> kDefaultProminent = {
    5,  8,  11, 17, 19, 21, 22, 24, 26, 27, 30, 31, 33, 35,
    36, 37, 39, 40, 42, 43, 45, 46, 48, 51, 54, 57, 62};

}  // namespace

ProminentSet ProminentSet::defaults() { return ProminentSet(kDefaultProminent); }

ProminentSet::ProminentSet(std::span<const int> indices) {
  if (indices.size() != kProminentCount) {
    throw Error(Errc::kInvalidArgument, "prominent set needs exactly 27 indices");
  }
  for (std::size_t i = 0; i < kProminentCount; ++i) {
    if (indices[i] < 0 || indices[i] > 67) {
      throw Error(Errc::kInvalidArgument, "prominent index out of [0,67]");
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw Error(Errc::kInvalidArgument,
                  "prominent indices must be strictly increasing");
    }
    indices_[i] = indices[i];
  }
}

void PipelineConfig::validate() const {
  if (q < 1) throw Error(Errc::kInvalidArgument, "q must be >= 1");
  if (frontality_tolerance_px < 0) {
    throw Error(Errc::kInvalidArgument, "frontality_tolerance_px must be >= 0");
  }
  if (enroll_frames < 1) throw Error(Errc::kInvalidArgument, "enroll_frames must be >= 1");
  if (auth_max_frames < 1) {
    throw Error(Errc::kInvalidArgument, "auth_max_frames must be >= 1");
  }
}

nlohmann::json config_to_json(const PipelineConfig& config) {
  const auto idx = config.prominent.indices();
  return {{"q", config.q},
          {"prominent_indices", std::vector<int>(idx.begin(), idx.end())},
          {"frontality_tolerance_px", config.frontality_tolerance_px},
          {"enroll_frames", config.enroll_frames},
          {"auth_max_frames", config.auth_max_frames}};
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::kParseError, "config must be a JSON object");
  PipelineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "q") {
        c.q = value.get<int>();
      } else if (key == "prominent_indices") {
        c.prominent = ProminentSet(value.get<std::vector<int>>());
      } else if (key == "frontality_tolerance_px") {
        c.frontality_tolerance_px = value.get<int>();
      } else if (key == "enroll_frames") {
        c.enroll_frames = value.get<int>();
      } else if (key == "auth_max_frames") {
        c.auth_max_frames = value.get<int>();
      } else {
        throw Error(Errc::kParseError, "unknown config key '" + key + "'");
      }
    }
    c.validate();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kParseError) throw;
    throw Error(Errc::kParseError, e.detail());
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path + ": " + e.what());
  }
}

}  // namespace bido
