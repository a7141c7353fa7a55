#pragma once

#include <cstdint>
#include <span>

#include "bido/secure_buffer.hpp"

namespace bido {

Digest sha256(std::span<const std::uint8_t> data);

}  // namespace bido
