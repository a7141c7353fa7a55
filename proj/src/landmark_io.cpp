#include "bido/landmark_io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "bido/error.hpp"

namespace bido {
namespace {

constexpr std::array<std::string_view, 6> kKeys = {
    "subject_id", "frame_id", "face_count", "width", "height", "landmarks"};

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(Errc::kParseError, what);
}

}  // namespace

nlohmann::ordered_json frame_to_json(const LandmarkFrame& frame) {
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (int k = 0; k < kLandmarkCount; ++k) {
    points.push_back({frame.landmarks(k, 0), frame.landmarks(k, 1)});
  }
  return nlohmann::ordered_json{{"subject_id", frame.subject_id},
                        {"frame_id", frame.frame_id},
                        {"face_count", frame.face_count},
                        {"width", frame.width},
                        {"height", frame.height},
                        {"landmarks", std::move(points)}};
}

LandmarkFrame frame_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("frame is not a JSON object");
  if (j.size() != kKeys.size()) schema_error("frame must have exactly 6 keys");
  for (auto key : kKeys) {
    if (!j.contains(key)) schema_error("missing key '" + std::string(key) + "'");
  }

  LandmarkFrame f;
  if (!j["subject_id"].is_string()) schema_error("subject_id must be a string");
  f.subject_id = j["subject_id"].get<std::string>();
  for (auto key : {"frame_id", "face_count", "width", "height"}) {
    if (!j[key].is_number_integer()) {
      schema_error(std::string(key) + " must be an integer");
    }
  }
  f.frame_id = j["frame_id"].get<std::int64_t>();
  f.face_count = j["face_count"].get<int>();
  f.width = j["width"].get<int>();
  f.height = j["height"].get<int>();
  if (f.face_count < 0) schema_error("face_count must be non-negative");
  if (f.width <= 0 || f.height <= 0) schema_error("width/height must be positive");

  const auto& pts = j["landmarks"];
  if (!pts.is_array() || pts.size() != kLandmarkCount) {
    schema_error("landmarks must be an array of 68 points");
  }
  for (int k = 0; k < kLandmarkCount; ++k) {
    const auto& p = pts[k];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      schema_error("landmark " + std::to_string(k) + " must be [x, y]");
    }
    f.landmarks(k, 0) = p[0].get<double>();
    f.landmarks(k, 1) = p[1].get<double>();
  }
  if (!f.landmarks.allFinite()) schema_error("landmark coordinates must be finite");
  return f;
}

std::string frame_to_line(const LandmarkFrame& frame) {
  return frame_to_json(frame).dump();
}

LandmarkFrame parse_frame_line(const std::string& line, std::size_t line_number) {
  try {
    return frame_from_json(nlohmann::json::parse(line));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError,
                "line " + std::to_string(line_number) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(Errc::kParseError,
                "line " + std::to_string(line_number) + ": " + e.detail());
  }
}

std::optional<LandmarkFrame> JsonlFrameReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return parse_frame_line(line, line_number_);
  }
  return std::nullopt;
}

std::vector<LandmarkFrame> read_frames(std::istream& in) {
  JsonlFrameReader reader(in);
  std::vector<LandmarkFrame> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return frames;
}

std::vector<LandmarkFrame> read_frames_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path);
  return read_frames(in);
}

void write_frames(std::ostream& out, const std::vector<LandmarkFrame>& frames) {
  for (const auto& f : frames) out << frame_to_line(f) << '\n';
}

}  // namespace bido
