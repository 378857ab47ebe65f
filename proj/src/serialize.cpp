#include "ftdso/serialize.hpp"

#include <fstream>
#include <iterator>

namespace ftdso {

void write_framed(const std::string& path, const char magic[8], std::uint32_t version,
                  const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> head;
  head.insert(head.end(), magic, magic + 8);
  put<std::uint32_t>(head, version);
  put<std::uint64_t>(head, payload.size());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  std::vector<std::uint8_t> tail;
  put<std::uint64_t>(tail, fnv1a64(payload.data(), payload.size()));
  out.write(reinterpret_cast<const char*>(tail.data()), static_cast<std::streamsize>(tail.size()));
  if (!out) throw FormatError("write failed for " + path);
}

std::vector<std::uint8_t> read_framed(const std::string& path, const char magic[8], std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<std::uint8_t> all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::uint8_t* p = all.data();
  const std::uint8_t* end = p + all.size();
  if (all.size() < 28 || std::memcmp(p, magic, 8) != 0) throw FormatError(path + ": bad magic");
  p += 8;
  auto ver = get<std::uint32_t>(p, end);
  if (ver != version) throw FormatError(path + ": unsupported version " + std::to_string(ver));
  auto size = get<std::uint64_t>(p, end);
  if (size + 8 != static_cast<std::uint64_t>(end - p)) throw FormatError(path + ": size mismatch");
  std::vector<std::uint8_t> payload(p, p + size);
  p += size;
  auto sum = get<std::uint64_t>(p, end);
  if (sum != fnv1a64(payload.data(), payload.size())) throw FormatError(path + ": checksum mismatch");
  return payload;
}

}  // namespace ftdso
