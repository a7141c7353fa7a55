#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bido/secure_buffer.hpp"

namespace bido {

inline constexpr std::string_view kCredIdPrefix = "BIDO1:";
inline constexpr std::string_view kVconst = "BIDO-VERIFICATION-CONSTANT-V1";

inline constexpr std::size_t kScalarSize = 32;
inline constexpr std::size_t kPublicKeySize = 65;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kCredIdSize = kCredIdPrefix.size() + kSignatureSize;

// Uncompressed SEC1 P-256 point, 0x04 || X || Y.
using PublicKey = std::array<std::uint8_t, kPublicKeySize>;

std::span<const std::uint8_t> as_bytes(std::string_view s);

// Fixed-width r || s, each 32 bytes big-endian.
struct Signature {
  std::array<std::uint8_t, kSignatureSize> bytes{};

  std::span<const std::uint8_t, 32> r() const {
    return std::span(bytes).first<32>();
  }
  std::span<const std::uint8_t, 32> s() const {
    return std::span(bytes).last<32>();
  }

  // Throws Error(kInvalidArgument) unless exactly 64 bytes.
  static Signature from_bytes(std::span<const std::uint8_t> raw);

  friend bool operator==(const Signature&, const Signature&) = default;
};

// A P-256 key pair whose private scalar lives in wiped memory. Move-only;
// once zeroized (or moved from) it refuses to sign. zeroize() wipes the
// public point as well, so callers that still need it copy it first.
class KeyPair {
 public:
  KeyPair(KeyPair&&) noexcept = default;
  KeyPair& operator=(KeyPair&&) noexcept = default;
  KeyPair(const KeyPair&) = delete;
  KeyPair& operator=(const KeyPair&) = delete;

  // scalar = (big-endian(seed) mod (n - 1)) + 1
  static KeyPair from_seed(const Digest& seed);

  const PublicKey& public_key() const { return public_key_; }
  std::span<const std::uint8_t> private_scalar() const { return scalar_; }

  bool zeroized() const noexcept { return zeroized_ || scalar_.size() != kScalarSize; }
  void zeroize() noexcept;

 private:
  KeyPair() = default;

  SecureBytes scalar_;
  PublicKey public_key_{};
  bool zeroized_ = false;
};

inline KeyPair keypair_from_seed(const Digest& seed) { return KeyPair::from_seed(seed); }
inline void zeroize(KeyPair& key) noexcept { key.zeroize(); }

// ECDSA over SHA-256(message) with an RFC 6979 nonce, s normalized to the
// low half of the group order. Throws Error(kKeyZeroized).
Signature sign(const KeyPair& key, std::span<const std::uint8_t> message);

// Accepts low-s and high-s. Throws Error(kMalformedPoint) when `public_key` is
// not a valid uncompressed point on P-256.
bool verify(std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message, const Signature& sig);

struct CredId {
  Signature signed_vconst;

  // prefix || signature, 70 bytes.
  std::vector<std::uint8_t> wire() const;
};

CredId make_cred_id(const KeyPair& key);

// Throws Error(kNotBidoCredential) on a foreign prefix and
// Error(kMalformedCredential) when the remainder is not 64 bytes.
Signature split_cred_id(std::span<const std::uint8_t> cred);

bool has_bido_prefix(std::span<const std::uint8_t> cred);

}  // namespace bido
