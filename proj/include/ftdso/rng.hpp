#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ftdso {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeds for independent random streams: the master seed is combined with a
// domain label ("hierarchy", "forest/tree", "pivots-B", ...) and up to two
// indices, so streams do not depend on build order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t i = 0,
                                 std::uint64_t j = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
  std::uint64_t x = splitmix64(master ^ splitmix64(h));
  x = splitmix64(x ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return splitmix64(x ^ splitmix64(j + 0x8cb92ba72f3d8dd7ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  // uniform in [0,1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }
  // uniform integer in [0, bound)
  std::uint64_t below(std::uint64_t bound) { return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ftdso
