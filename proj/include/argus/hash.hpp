#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace argus {

// 128-bit FNV-1a.  Used for cache keys and prompt template ids; collisions
// across the handful of strings a run produces are not a practical concern,
// and it keeps the library header-only with no crypto dependency.
class Fnv128 {
 public:
  void update(std::string_view bytes) {
    for (unsigned char ch : bytes) {
      state_ ^= ch;
      state_ *= kPrime;
    }
  }

  // Length-prefixed framing so that ("ab","c") and ("a","bc") hash
  // differently when several fields feed one key.
  void update_framed(std::string_view bytes) {
    std::uint64_t len = bytes.size();
    char prefix[8];
    for (int i = 0; i < 8; ++i) prefix[i] = static_cast<char>((len >> (8 * i)) & 0xff);
    update(std::string_view(prefix, 8));
    update(bytes);
  }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    unsigned __int128 v = state_;
    for (int i = 31; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(v & 0xf)];
      v >>= 4;
    }
    return out;
  }

 private:
  // FNV primes/offsets for the 128-bit variant.
  static constexpr unsigned __int128 kPrime =
      (static_cast<unsigned __int128>(1) << 88) | (static_cast<unsigned __int128>(1) << 8) | 0x3b;
  static constexpr unsigned __int128 kOffset =
      (static_cast<unsigned __int128>(0x6C62272E07BB0142ULL) << 64) | 0x62B821756295C58DULL;

  unsigned __int128 state_ = kOffset;
};

// Hash of an ordered list of fields, each independently framed.
inline std::string content_hash(std::initializer_list<std::string_view> parts) {
  Fnv128 h;
  for (std::string_view part : parts) h.update_framed(part);
  return h.hex();
}

}  // namespace argus
