#pragma once

#include "ftdso/tz_oracle.hpp"

namespace ftdso::testing {

// Classic query walk of the Thorup-Zwick oracle, kept as an independent
// comparison point for the modified query.
inline Dist tz_original_query(const TZOracle& o, Vertex s, Vertex t) {
  Vertex a = s, b = t, w = s;
  Dist da = 0;
  int i = 0;
  while (true) {
    if (auto d = o.bunch_dist(b, w)) return add_sat(da, *d);
    if (++i >= o.k()) return kInf;
    std::swap(a, b);
    w = o.pivot(i, a);
    if (w == kNoVertex) return kInf;
    da = o.pivot_dist(i, a);
  }
}

}  // namespace ftdso::testing
