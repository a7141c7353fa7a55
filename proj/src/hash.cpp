#include "bido/hash.hpp"

#include <openssl/evp.h>

#include "bido/error.hpp"

namespace bido {

Digest sha256(std::span<const std::uint8_t> data) {
  Digest::Bytes out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != kDigestSize) {
    throw Error(Errc::kInvalidArgument, "SHA-256 failed");
  }
  Digest d(out);
  secure_wipe(out.data(), out.size());
  return d;
}

}  // namespace bido
