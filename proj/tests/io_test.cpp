#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bido/base64url.hpp"
#include "bido/config.hpp"
#include "bido/landmark_io.hpp"
#include "test_support.hpp"

namespace bido {
namespace {

using testing::code_of;
using testing::mean_face_frame;

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

TEST(Base64Url, KnownVectors) {
  EXPECT_EQ(base64url_encode(bytes("")), "");
  EXPECT_EQ(base64url_encode(bytes("f")), "Zg");
  EXPECT_EQ(base64url_encode(bytes("fo")), "Zm8");
  EXPECT_EQ(base64url_encode(bytes("foo")), "Zm9v");
  EXPECT_EQ(base64url_encode(bytes("foobar")), "Zm9vYmFy");
  EXPECT_EQ(base64url_encode(std::vector<std::uint8_t>{0xfb, 0xff, 0xbf}), "-_-_");
}

TEST(Base64Url, RoundTrip) {
  for (int n = 0; n < 80; ++n) {
    std::vector<std::uint8_t> v(n);
    for (int i = 0; i < n; ++i) v[i] = static_cast<std::uint8_t>(i * 53 + n);
    EXPECT_EQ(base64url_decode(base64url_encode(v)), v);
  }
  EXPECT_EQ(base64url_decode("Zg=="), bytes("f"));
}

TEST(Base64Url, RejectsBadInput) {
  EXPECT_EQ(code_of([] { base64url_decode("Zm9v+"); }), Errc::kParseError);
  EXPECT_EQ(code_of([] { base64url_decode("Z"); }), Errc::kParseError);
  EXPECT_EQ(code_of([] { base64url_decode("Zm/v"); }), Errc::kParseError);
}

TEST(LandmarkIo, RoundTripIsExact) {
  LandmarkFrame f = testing::similarity(mean_face_frame(), 0.123, 1.9, 321.5, 17.25);
  f.subject_id = "subject-0007";
  f.frame_id = 42;
  f.face_count = 1;
  const std::string line = frame_to_line(f);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const LandmarkFrame g = parse_frame_line(line, 1);
  EXPECT_EQ(g.subject_id, f.subject_id);
  EXPECT_EQ(g.frame_id, 42);
  EXPECT_EQ(g.width, f.width);
  EXPECT_EQ(g.landmarks, f.landmarks);
}

TEST(LandmarkIo, KeyOrder) {
  const auto j = frame_to_json(mean_face_frame());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"subject_id", "frame_id", "face_count", "width",
                                            "height", "landmarks"}));
}

TEST(LandmarkIo, ReaderSkipsBlankLinesAndNamesBadLine) {
  const std::string good = frame_to_line(mean_face_frame());
  std::istringstream in(good + "\n\n" + good + "\n{\"subject_id\":\"x\"}\n");
  JsonlFrameReader reader(in);
  EXPECT_TRUE(reader.next().has_value());
  EXPECT_TRUE(reader.next().has_value());
  try {
    reader.next();
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(LandmarkIo, SchemaViolations) {
  auto j = nlohmann::json::parse(frame_to_line(mean_face_frame()));
  auto parse = [](nlohmann::json v) {
    return code_of([&] { frame_from_json(v); });
  };
  EXPECT_EQ(parse(j), std::nullopt);
  auto extra = j;
  extra["confidence"] = 1;
  EXPECT_EQ(parse(extra), Errc::kParseError);
  auto short_list = j;
  short_list["landmarks"].erase(0);
  EXPECT_EQ(parse(short_list), Errc::kParseError);
  auto bad_point = j;
  bad_point["landmarks"][3] = nlohmann::json::array({1.0});
  EXPECT_EQ(parse(bad_point), Errc::kParseError);
  auto string_count = j;
  string_count["face_count"] = "1";
  EXPECT_EQ(parse(string_count), Errc::kParseError);
  auto missing = j;
  missing.erase("width");
  EXPECT_EQ(parse(missing), Errc::kParseError);
  EXPECT_EQ(code_of([] { parse_frame_line("not json", 9); }), Errc::kParseError);
}

TEST(Config, Defaults) {
  const PipelineConfig c;
  EXPECT_EQ(c.q, 8);
  EXPECT_EQ(c.enroll_frames, 200);
  EXPECT_EQ(c.auth_max_frames, 200);
  EXPECT_EQ(c.frontality_tolerance_px, 0);
  const std::array<int, 27> expected{5,  8,  11, 17, 19, 21, 22, 24, 26, 27, 30, 31, 33, 35,
                                     36, 37, 39, 40, 42, 43, 45, 46, 48, 51, 54, 57, 62};
  EXPECT_TRUE(std::ranges::equal(c.prominent.indices(), expected));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTripAndValidation) {
  PipelineConfig c;
  c.q = 6;
  c.enroll_frames = 50;
  const PipelineConfig d = config_from_json(config_to_json(c));
  EXPECT_EQ(d.q, 6);
  EXPECT_EQ(d.enroll_frames, 50);
  EXPECT_EQ(d.prominent, c.prominent);

  EXPECT_EQ(code_of([] { config_from_json({{"q", 0}}); }), Errc::kParseError);
  EXPECT_EQ(code_of([] { config_from_json({{"bogus", 1}}); }), Errc::kParseError);
  EXPECT_EQ(code_of([] { config_from_json({{"enroll_frames", 0}}); }), Errc::kParseError);
  auto unsorted = config_to_json(c);
  std::swap(unsorted["prominent_indices"][0], unsorted["prominent_indices"][1]);
  EXPECT_EQ(code_of([&] { config_from_json(unsorted); }), Errc::kParseError);
}

TEST(Config, ProminentSetInvariant) {
  std::array<int, 27> idx{};
  for (int i = 0; i < 27; ++i) idx[i] = i * 2;
  EXPECT_NO_THROW(ProminentSet{idx});
  idx[26] = 68;
  EXPECT_THROW(ProminentSet{idx}, Error);
  std::array<int, 26> too_few{};
  EXPECT_THROW(ProminentSet{too_few}, Error);
}

TEST(Config, LoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "bido_config_test.json";
  std::ofstream(path) << R"({"q": 10, "frontality_tolerance_px": 2})";
  const PipelineConfig c = load_config(path.string());
  EXPECT_EQ(c.q, 10);
  EXPECT_EQ(c.frontality_tolerance_px, 2);
  std::filesystem::remove(path);
  EXPECT_EQ(code_of([&] { load_config(path.string()); }), Errc::kIoError);
}

}  // namespace
}  // namespace bido
