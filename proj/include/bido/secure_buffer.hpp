#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace bido {

// Overwrites `n` bytes at `ptr` with zeros in a way the optimizer may not
// elide.
void secure_wipe(void* ptr, std::size_t n) noexcept;

// Allocator that wipes every block before handing it back to the heap, so
// vector growth and destruction never leave secret copies behind.
template <typename T>
struct ZeroizingAllocator {
  using value_type = T;

  ZeroizingAllocator() noexcept = default;
  template <typename U>
  ZeroizingAllocator(const ZeroizingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return std::allocator<T>{}.allocate(n); }
  void deallocate(T* p, std::size_t n) noexcept {
    secure_wipe(p, n * sizeof(T));
    std::allocator<T>{}.deallocate(p, n);
  }

  template <typename U>
  bool operator==(const ZeroizingAllocator<U>&) const noexcept {
    return true;
  }
};

using SecureBytes = std::vector<std::uint8_t, ZeroizingAllocator<std::uint8_t>>;

inline void zeroize(SecureBytes& bytes) noexcept {
  secure_wipe(bytes.data(), bytes.size());
}

inline constexpr std::size_t kDigestSize = 32;

// A SHA-256 digest. Per-frame digests and the enrollment seed are both
// secrets, so the storage is wiped on destruction and on zeroize().
class Digest {
 public:
  using Bytes = std::array<std::uint8_t, kDigestSize>;

  Digest() = default;
  explicit Digest(const Bytes& bytes) : bytes_(bytes) {}
  explicit Digest(std::span<const std::uint8_t> bytes);
  Digest(const Digest&) = default;
  Digest& operator=(const Digest&) = default;
  ~Digest() { secure_wipe(bytes_.data(), bytes_.size()); }

  std::span<const std::uint8_t, kDigestSize> bytes() const { return bytes_; }
  bool is_zero() const noexcept;
  void zeroize() noexcept { secure_wipe(bytes_.data(), bytes_.size()); }

  friend bool operator==(const Digest&, const Digest&) = default;
  friend std::strong_ordering operator<=>(const Digest& a, const Digest& b) {
    return a.bytes_ <=> b.bytes_;
  }

 private:
  Bytes bytes_{};
};

inline void zeroize(Digest& d) noexcept { d.zeroize(); }

inline void zeroize(std::vector<Digest>& digests) noexcept {
  for (auto& d : digests) d.zeroize();
}

}  // namespace bido
