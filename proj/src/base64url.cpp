#include "bido/base64url.hpp"

#include <algorithm>

#include <openssl/evp.h>

#include "bido/error.hpp"

namespace bido {

std::string base64url_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  while (!out.empty() && out.back() == '=') out.pop_back();
  std::replace(out.begin(), out.end(), '+', '-');
  std::replace(out.begin(), out.end(), '/', '_');
  return out;
}

std::vector<std::uint8_t> base64url_decode(std::string_view text) {
  std::string std64(text);
  while (!std64.empty() && std64.back() == '=') std64.pop_back();
  for (char& ch : std64) {
    const bool ok = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_';
    if (!ok) throw Error(Errc::kParseError, "invalid base64url character");
    if (ch == '-') ch = '+';
    if (ch == '_') ch = '/';
  }
  const std::size_t rem = std64.size() % 4;
  if (rem == 1) throw Error(Errc::kParseError, "invalid base64url length");
  const std::size_t pad = rem == 0 ? 0 : 4 - rem;
  std64.append(pad, '=');

  std::vector<std::uint8_t> out(std64.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(std64.data()),
                                static_cast<int>(std64.size()));
  if (n < 0) throw Error(Errc::kParseError, "invalid base64url payload");
  // EVP_DecodeBlock counts the bytes produced by padding characters.
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace bido
