#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bido {

// RFC 4648 section 5 alphabet, no padding on output; padding is tolerated on
// input. Decoding throws Error(kParseError) on bad characters or lengths.
std::string base64url_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64url_decode(std::string_view text);

}  // namespace bido
