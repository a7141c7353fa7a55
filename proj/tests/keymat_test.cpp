#include <set>

#include <gtest/gtest.h>
#include <openssl/rand.h>

#include "bido/error.hpp"
#include "bido/hash.hpp"
#include "bido/keymat.hpp"
#include "test_support.hpp"

namespace bido {
namespace {

using testing::code_of;
using testing::from_hex;
using testing::to_hex;

constexpr const char* kGenerator =
    "046b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"
    "4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5";
constexpr const char* kOrderMinusOne =
    "ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632550";

Digest digest_from_hex(const char* hex) { return Digest(from_hex(hex)); }

// scalar - 1 = d - 1 gives a seed whose key is exactly d.
Digest seed_for_scalar(const char* scalar_hex) {
  auto bytes = from_hex(scalar_hex);
  for (int i = 31; i >= 0; --i) {
    if (bytes[i]-- != 0) break;
  }
  return Digest(bytes);
}

Signature sig_from_hex(const char* hex) { return Signature::from_bytes(from_hex(hex)); }

TEST(KeyPair, ZeroSeedGivesGenerator) {
  const KeyPair k = keypair_from_seed(Digest{});
  EXPECT_EQ(to_hex(k.private_scalar()),
            "0000000000000000000000000000000000000000000000000000000000000001");
  EXPECT_EQ(to_hex(k.public_key()), kGenerator);
}

TEST(KeyPair, OrderMinusOneWrapsToOne) {
  const KeyPair k = keypair_from_seed(digest_from_hex(kOrderMinusOne));
  EXPECT_EQ(to_hex(k.private_scalar()),
            "0000000000000000000000000000000000000000000000000000000000000001");
  EXPECT_EQ(to_hex(k.public_key()), kGenerator);
}

TEST(KeyPair, HashedSeedVector) {
  const Digest seed = sha256(as_bytes("bido-test-seed"));
  EXPECT_EQ(to_hex(seed.bytes()),
            "da518664651c02ef4105c9cdfb659ce454eb43146ba17827034c9a225ea77f51");
  const KeyPair k = keypair_from_seed(seed);
  EXPECT_EQ(to_hex(k.private_scalar()),
            "da518664651c02ef4105c9cdfb659ce454eb43146ba17827034c9a225ea77f52");
  EXPECT_EQ(to_hex(k.public_key()),
            "04ae4688d2b10d0cec1d7fd962ab3826239bf1c365362a1c6b35ba785cb9c2ea0f"
            "56c0f86a102fccece152a4ce7760ae76786eb2a98e9a71872292730f5acab1ce");
  const KeyPair again = keypair_from_seed(seed);
  EXPECT_EQ(again.public_key(), k.public_key());
  EXPECT_EQ(to_hex(again.private_scalar()), to_hex(k.private_scalar()));
}

TEST(Sign, DeterministicNonceVectors) {
  const KeyPair k = keypair_from_seed(
      seed_for_scalar("c9afa9d845ba75166b5c215767b1d6934e50c3db36e89b127b8a622b120f6721"));
  EXPECT_EQ(to_hex(k.public_key()),
            "0460fed4ba255a9d31c961eb74c6356d68c049b8923b61fa6ce669622e60f29fb6"
            "7903fe1008b8bc99a41ae9e95628bc64f2f1b20c2d7e9f5177a3c294d4462299");
  EXPECT_EQ(to_hex(sign(k, as_bytes("sample")).bytes),
            "efd48b2aacb6a8fd1140dd9cd45e81d69d2c877b56aaf991c34d0ea84eaf3716"
            "0834e36ad29a83bf2bc9385e491d6099c8fdf9d1ed67aa7ea5f51f93782857a9");
  EXPECT_EQ(to_hex(sign(k, as_bytes("test")).bytes),
            "f1abb023518351cd71d881567b1ea663ed3efcf6c5132b354f28d3b0b7d38367"
            "019f4113742a2b14bd25926b49c649155f267e60d3814b4c0cc84250e46f0083");
}

TEST(Sign, VconstVectors) {
  EXPECT_EQ(to_hex(make_cred_id(keypair_from_seed(Digest{})).signed_vconst.bytes),
            "0154b432658a92affd1a1e09625d7ee5108465f597570d01766f0765d4ce09e8"
            "1e7f16a1abbb467d40face0d1f9f980b05c04d958375416661543a4893b058b4");
  const KeyPair k = keypair_from_seed(sha256(as_bytes("bido-test-seed")));
  EXPECT_EQ(to_hex(sign(k, as_bytes(kVconst)).bytes),
            "b30ae8b2292ae50321a191e7ab62200d72b394ab5d122ac066d87378473ab525"
            "03ec4ea171900d5e9fa0c648ab6a9b7434d824b362b7fe961ba5fa52c7579b02");
}

TEST(Sign, RoundTripAndDeterminism) {
  const KeyPair k = keypair_from_seed(sha256(as_bytes("round")));
  const auto msg = as_bytes("challenge bytes");
  const Signature a = sign(k, msg);
  EXPECT_EQ(a, sign(k, msg));
  EXPECT_TRUE(verify(k.public_key(), msg, a));
}

TEST(Verify, RejectsTamperedInputs) {
  const KeyPair k = keypair_from_seed(sha256(as_bytes("k1")));
  const KeyPair other = keypair_from_seed(sha256(as_bytes("k2")));
  std::vector<std::uint8_t> msg{1, 2, 3, 4};
  const Signature sig = sign(k, msg);
  auto flipped = msg;
  flipped[0] ^= 0x01;
  EXPECT_FALSE(verify(k.public_key(), flipped, sig));
  EXPECT_FALSE(verify(other.public_key(), msg, sig));
  EXPECT_FALSE(verify(k.public_key(), msg, sign(other, msg)));
  Signature zero;
  EXPECT_FALSE(verify(k.public_key(), msg, zero));
}

TEST(Verify, AcceptsHighS) {
  const KeyPair k = keypair_from_seed(sha256(as_bytes("hs")));
  const auto msg = as_bytes("m");
  Signature sig = sign(k, msg);
  // s' = n - s
  const auto n = from_hex("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551");
  int borrow = 0;
  for (int i = 31; i >= 0; --i) {
    int v = n[i] - sig.bytes[32 + i] - borrow;
    borrow = v < 0;
    sig.bytes[32 + i] = static_cast<std::uint8_t>(v + (borrow ? 256 : 0));
  }
  EXPECT_TRUE(verify(k.public_key(), msg, sig));
}

TEST(Verify, MalformedPoints) {
  const KeyPair k = keypair_from_seed(Digest{});
  const Signature sig = sign(k, as_bytes("m"));
  auto pub = std::vector<std::uint8_t>(k.public_key().begin(), k.public_key().end());
  auto check = [&](std::vector<std::uint8_t> p) {
    return code_of([&] { verify(p, as_bytes("m"), sig); });
  };
  auto short_pub = pub;
  short_pub.pop_back();
  EXPECT_EQ(check(short_pub), Errc::kMalformedPoint);
  auto compressed = pub;
  compressed[0] = 0x02;
  EXPECT_EQ(check(compressed), Errc::kMalformedPoint);
  auto off_curve = pub;
  off_curve[64] ^= 0x01;
  EXPECT_EQ(check(off_curve), Errc::kMalformedPoint);
  EXPECT_EQ(check(std::vector<std::uint8_t>(65, 0)), Errc::kMalformedPoint);
}

TEST(Zeroize, KeyPairRefusesToSign) {
  KeyPair k = keypair_from_seed(sha256(as_bytes("z")));
  EXPECT_FALSE(k.zeroized());
  zeroize(k);
  EXPECT_TRUE(k.zeroized());
  EXPECT_EQ(code_of([&] { sign(k, as_bytes("m")); }), Errc::kKeyZeroized);
  EXPECT_NO_THROW(zeroize(k));
  EXPECT_EQ(code_of([&] { sign(k, as_bytes("m")); }), Errc::kKeyZeroized);
  EXPECT_TRUE(std::ranges::all_of(k.public_key(), [](auto b) { return b == 0; }));
}

TEST(Zeroize, MovedFromKeyRefusesToSign) {
  KeyPair k = keypair_from_seed(sha256(as_bytes("mv")));
  KeyPair taken = std::move(k);
  EXPECT_TRUE(k.zeroized());  // NOLINT(bugprone-use-after-move)
  EXPECT_NO_THROW(sign(taken, as_bytes("m")));
}

TEST(CredId, LayoutAndInverse) {
  const KeyPair k = keypair_from_seed(sha256(as_bytes("cred")));
  const CredId c = make_cred_id(k);
  const auto wire = c.wire();
  ASSERT_EQ(wire.size(), kCredIdSize);
  EXPECT_EQ(wire.size(), 70u);
  EXPECT_EQ(std::string(wire.begin(), wire.begin() + 6), "BIDO1:");
  EXPECT_TRUE(has_bido_prefix(wire));
  const Signature s = split_cred_id(wire);
  EXPECT_EQ(s, c.signed_vconst);
  EXPECT_TRUE(verify(k.public_key(), as_bytes(kVconst), s));
}

TEST(CredId, SplitErrors) {
  std::vector<std::uint8_t> foreign{'X', 'Y', 'Z', ':'};
  foreign.resize(4 + 64, 7);
  EXPECT_EQ(code_of([&] { split_cred_id(foreign); }), Errc::kNotBidoCredential);
  EXPECT_FALSE(has_bido_prefix(foreign));
  std::vector<std::uint8_t> truncated(kCredIdPrefix.begin(), kCredIdPrefix.end());
  truncated.resize(6 + 63, 7);
  EXPECT_EQ(code_of([&] { split_cred_id(truncated); }), Errc::kMalformedCredential);
  EXPECT_EQ(code_of([&] { split_cred_id(std::vector<std::uint8_t>{'B'}); }),
            Errc::kNotBidoCredential);
}

TEST(CredId, NoCollisionsAndSoundAcrossKeys) {
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<PublicKey> pubs;
  std::vector<Signature> sigs;
  for (int i = 0; i < 1000; ++i) {
    Digest::Bytes seed{};
    ASSERT_EQ(RAND_bytes(seed.data(), static_cast<int>(seed.size())), 1);
    const KeyPair k = keypair_from_seed(Digest(seed));
    const CredId c = make_cred_id(k);
    EXPECT_TRUE(seen.insert(c.wire()).second);
    pubs.push_back(k.public_key());
    sigs.push_back(c.signed_vconst);
  }
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(verify(pubs[i], as_bytes(kVconst), sigs[i + 1]));
  }
}

TEST(Signature, FromBytesRequires64) {
  EXPECT_THROW(Signature::from_bytes(std::vector<std::uint8_t>(63)), Error);
  EXPECT_NO_THROW(Signature::from_bytes(std::vector<std::uint8_t>(64)));
}

}  // namespace
}  // namespace bido
