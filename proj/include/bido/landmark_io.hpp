#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bido/geometry.hpp"

namespace bido {

// Landmark wire format: one JSON object per line with exactly the keys
// subject_id, frame_id, face_count, width, height, landmarks ([[x,y] x 68]).
nlohmann::ordered_json frame_to_json(const LandmarkFrame& frame);
LandmarkFrame frame_from_json(const nlohmann::json& j);

std::string frame_to_line(const LandmarkFrame& frame);

// Throws Error(kParseError) naming `line_number` on any schema violation.
LandmarkFrame parse_frame_line(const std::string& line, std::size_t line_number);

// Streaming reader over a JSONL input. Blank lines are skipped.
class JsonlFrameReader {
 public:
  explicit JsonlFrameReader(std::istream& in) : in_(in) {}

  std::optional<LandmarkFrame> next();
  std::size_t line_number() const { return line_number_; }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
};

std::vector<LandmarkFrame> read_frames(std::istream& in);
std::vector<LandmarkFrame> read_frames_file(const std::string& path);
void write_frames(std::ostream& out, const std::vector<LandmarkFrame>& frames);

}  // namespace bido
