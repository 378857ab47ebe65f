#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace ftdso {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Little-endian host assumed; the file header records a magic and version.
template <class T>
void put(std::vector<std::uint8_t>& out, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
void put_vec(std::vector<std::uint8_t>& out, const std::vector<T>& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  put<std::uint64_t>(out, v.size());
  const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
  out.insert(out.end(), p, p + v.size() * sizeof(T));
}

template <class T>
T get(const std::uint8_t*& p, const std::uint8_t* end) {
  if (static_cast<std::size_t>(end - p) < sizeof(T)) throw FormatError("truncated input");
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

template <class T>
std::vector<T> get_vec(const std::uint8_t*& p, const std::uint8_t* end) {
  auto n = get<std::uint64_t>(p, end);
  if (n > static_cast<std::uint64_t>(end - p) / sizeof(T)) throw FormatError("truncated vector");
  std::vector<T> v(n);
  if (n) std::memcpy(v.data(), p, n * sizeof(T));
  p += n * sizeof(T);
  return v;
}

inline std::uint64_t fnv1a64(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) h = (h ^ p[i]) * 0x100000001b3ULL;
  return h;
}

// Frame: magic(8) version(4) payload-size(8) payload checksum(8).
void write_framed(const std::string& path, const char magic[8], std::uint32_t version,
                  const std::vector<std::uint8_t>& payload);
std::vector<std::uint8_t> read_framed(const std::string& path, const char magic[8], std::uint32_t version);

}  // namespace ftdso
