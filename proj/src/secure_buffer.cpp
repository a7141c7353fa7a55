#include "bido/secure_buffer.hpp"

#include <algorithm>

#include <openssl/crypto.h>

#include "bido/error.hpp"

namespace bido {

void secure_wipe(void* ptr, std::size_t n) noexcept {
  if (ptr != nullptr && n != 0) OPENSSL_cleanse(ptr, n);
}

Digest::Digest(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kDigestSize) {
    throw Error(Errc::kInvalidArgument, "digest must be 32 bytes");
  }
  std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

bool Digest::is_zero() const noexcept {
  return std::all_of(bytes_.begin(), bytes_.end(),
                     [](std::uint8_t b) { return b == 0; });
}

}  // namespace bido
