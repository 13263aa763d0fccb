#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace insight {

/// 64-bit mixing helpers for content fingerprints.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr uint64_t hash_combine(uint64_t seed, uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline uint64_t hash_bytes(std::string_view s, uint64_t seed = 0xcbf29ce484222325ULL) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

inline uint64_t hash_double(double v) {
  if (v != v) return 0x7ff8dead7ff8deadULL;  // all NaNs alike
  if (v == 0.0) v = 0.0;                      // -0 == +0
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return mix64(bits);
}

/// Canonical state fingerprint.
struct Fingerprint {
  uint64_t hi = 0;
  uint64_t lo = 0;

  bool operator==(const Fingerprint&) const = default;
  auto operator<=>(const Fingerprint&) const = default;
  std::string hex() const;
};

struct FingerprintHash {
  std::size_t operator()(const Fingerprint& f) const { return static_cast<std::size_t>(f.hi ^ mix64(f.lo)); }
};

}  // namespace insight
