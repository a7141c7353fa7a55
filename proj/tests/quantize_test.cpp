#include <algorithm>
#include <map>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "bido/error.hpp"
#include "bido/hash.hpp"
#include "bido/keymat.hpp"
#include "bido/quantize.hpp"
#include "test_support.hpp"

namespace bido {
namespace {

using testing::from_hex;
using testing::mean_face_frame;
using testing::to_hex;

AlignedFrame aligned_with_point(int index, Point p) {
  AlignedFrame a;
  a.landmarks.rowwise() = kCanonicalMidpoint.transpose();
  a.landmarks.row(index) = p.transpose();
  return a;
}

Digest digest_of(std::uint8_t tag) {
  Digest::Bytes b{};
  b.fill(tag);
  return Digest(b);
}

TEST(DistanceVector, Examples) {
  const ProminentSet p = ProminentSet::defaults();
  const int first = p.indices()[0];
  EXPECT_EQ(distance_vector(aligned_with_point(first, {100, 70}), p)(0), 0.0);
  EXPECT_EQ(distance_vector(aligned_with_point(first, {103, 74}), p)(0), 5.0);
  EXPECT_EQ(distance_vector(aligned_with_point(first, {100, 198}), p)(0), 128.0);
}

TEST(DistanceVector, FollowsProminentOrder) {
  const ProminentSet p = ProminentSet::defaults();
  AlignedFrame a;
  for (int k = 0; k < kLandmarkCount; ++k) a.landmarks.row(k) << 100 + k, 70;
  const DistanceVector d = distance_vector(a, p);
  for (std::size_t i = 0; i < kProminentCount; ++i) EXPECT_EQ(d(i), p.indices()[i]);
}

TEST(Quantize, FloorBoundaries) {
  DistanceVector d = DistanceVector::Zero();
  d(0) = 63.999;
  d(1) = 64.0;
  d(2) = 0.0;
  d(3) = 10000.0;
  const auto v = quantize(d, 8);
  EXPECT_EQ(v[0], 7);
  EXPECT_EQ(v[1], 8);
  EXPECT_EQ(v[2], 0);
  EXPECT_EQ(v[3], 255);
}

TEST(Quantize, RejectsNonPositiveStep) {
  EXPECT_THROW(quantize(DistanceVector::Zero(), 0), Error);
  EXPECT_THROW(quantize(DistanceVector::Zero(), -8), Error);
}

TEST(Quantize, MonotoneAndTolerant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0, 200);
  for (int trial = 0; trial < 500; ++trial) {
    DistanceVector a, b;
    for (int i = 0; i < kProminentCount; ++i) {
      a(i) = dist(rng);
      b(i) = a(i) + std::uniform_real_distribution<double>(0, 10)(rng);
    }
    const auto qa = quantize(a, 8);
    const auto qb = quantize(b, 8);
    for (int i = 0; i < kProminentCount; ++i) {
      EXPECT_LE(qa[i], qb[i]);
      // Perturbations that stay inside one bin are absorbed.
      const double lo = qa[i] * 8.0;
      DistanceVector c = a;
      c(i) = lo + 0.5 * (a(i) - lo);
      EXPECT_EQ(quantize(c, 8)[i], qa[i]);
    }
  }
}

TEST(QuantizedVector, PacksValuesThenSalt) {
  QuantizedValues v{};
  v[0] = 3;
  v[26] = 200;
  QuantizedVector qv(v, "pepper");
  ASSERT_EQ(qv.packed().size(), 27u + 6u);
  EXPECT_EQ(qv.values()[0], 3);
  EXPECT_EQ(qv.values()[26], 200);
  EXPECT_EQ(std::string(qv.salt_bytes().begin(), qv.salt_bytes().end()), "pepper");
  qv.zeroize();
  EXPECT_TRUE(std::ranges::all_of(qv.packed(), [](auto b) { return b == 0; }));
}

TEST(SaltedHash, ZeroValuesEmptySalt) {
  const Digest d = salted_hash(QuantizedValues{}, "");
  EXPECT_EQ(to_hex(d.bytes()),
            "ea49aa9f6f6cf2d53d454e628ba5a339cc000230c4651655d0237711d747f50b");
}

TEST(SaltedHash, MatchesHashOfConcatenation) {
  QuantizedValues v{};
  for (int i = 0; i < kProminentCount; ++i) v[i] = static_cast<std::uint8_t>(i * 9);
  std::vector<std::uint8_t> concat(v.begin(), v.end());
  for (char c : std::string("s\xc3\xa9l")) concat.push_back(static_cast<std::uint8_t>(c));
  EXPECT_EQ(salted_hash(v, "s\xc3\xa9l"), sha256(concat));
}

TEST(SaltedHash, DeterministicAndSaltSensitive) {
  QuantizedValues v{};
  v[4] = 17;
  EXPECT_EQ(salted_hash(v, "a"), salted_hash(v, "a"));
  EXPECT_NE(salted_hash(v, "a"), salted_hash(v, "b"));
}

TEST(MajorityVote, Examples) {
  const Digest h1 = digest_of(1), h2 = digest_of(2);
  const std::vector<Digest> a{h1, h1, h2};
  EXPECT_EQ(majority_vote(a), h1);
  const std::vector<Digest> single{h2};
  EXPECT_EQ(majority_vote(single), h2);
  const std::vector<Digest> tie{h2, h1};
  EXPECT_EQ(majority_vote(tie), h1);
  EXPECT_THROW(majority_vote(std::span<const Digest>{}), Error);
}

Digest brute_force_mode(const std::vector<Digest>& v) {
  std::size_t best_count = 0;
  const Digest* best = nullptr;
  for (const Digest& a : v) {
    const auto count = static_cast<std::size_t>(std::count(v.begin(), v.end(), a));
    const bool lex_less =
        best && std::ranges::lexicographical_compare(a.bytes(), best->bytes());
    if (count > best_count || (count == best_count && lex_less)) {
      best_count = count;
      best = &a;
    }
  }
  return *best;
}

TEST(MajorityVote, AgreesWithBruteForceAndIgnoresOrder) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const int distinct = 1 + static_cast<int>(rng() % 6);
    std::vector<Digest> pool;
    for (int i = 0; i < distinct; ++i) {
      Digest::Bytes b{};
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      if (trial % 3 == 0) b.fill(0), b[31] = static_cast<std::uint8_t>(i * 37);
      pool.emplace_back(b);
    }
    std::vector<Digest> votes;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) votes.push_back(pool[rng() % pool.size()]);
    const Digest expected = brute_force_mode(votes);
    EXPECT_EQ(majority_vote(votes), expected);
    std::shuffle(votes.begin(), votes.end(), rng);
    EXPECT_EQ(majority_vote(votes), expected);
  }
}

TEST(FrameDigest, GateAndDeterminism) {
  const PipelineConfig config;
  LandmarkFrame f = mean_face_frame();
  f.face_count = 2;
  EXPECT_EQ(std::get<Rejection>(frame_digest(f, "salt", config)), Rejection::kNotExactlyOneFace);
  f.face_count = 1;
  const Digest a = std::get<Digest>(frame_digest(f, "salt", config));
  EXPECT_EQ(a, std::get<Digest>(frame_digest(f, "salt", config)));
  EXPECT_NE(a, std::get<Digest>(frame_digest(f, "salu", config)));
}

TEST(FrameDigest, ComposesStages) {
  const PipelineConfig config;
  const LandmarkFrame f = testing::similarity(mean_face_frame(), 0.3, 1.7, 50, 20);
  const auto aligned = std::get<AlignedFrame>(validate_frame(f));
  const Digest expected =
      salted_hash(quantize(distance_vector(aligned, config.prominent), config.q), "x");
  EXPECT_EQ(std::get<Digest>(frame_digest(f, "x", config)), expected);
}

TEST(Digest, ZeroizeClears) {
  Digest d = digest_of(0xAB);
  EXPECT_FALSE(d.is_zero());
  zeroize(d);
  EXPECT_TRUE(d.is_zero());
  EXPECT_TRUE(std::ranges::all_of(d.bytes(), [](auto b) { return b == 0; }));
  zeroize(d);
  EXPECT_TRUE(d.is_zero());
}

TEST(Hash, KnownVector) {
  EXPECT_EQ(to_hex(sha256(as_bytes("abc")).bytes()),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace bido
