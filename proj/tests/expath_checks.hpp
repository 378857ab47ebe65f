#pragma once

#include <string>
#include <vector>

#include "ftdso/expath.hpp"

namespace ftdso::testing {

// Factor-4 prefix/suffix bounds for a returned expath. With lambda > 0 the
// bounds get an additive lambda and only apply to interior vertices whose
// prefix and suffix both exceed lambda.
inline bool prefix_bounds_hold(const Graph& g, ExpathEngine& eng, const EdgeMask* A, const ExpathStructure& p,
                               std::string* why = nullptr) {
  if (p.empty()) return true;
  const auto vs = p.vertices(eng.apsp());
  const auto from_s = eng.decomposable_sssp(A, p.s, p.ell);
  const auto to_t = eng.decomposable_sssp(A, p.t, p.ell);
  std::vector<Dist> pre(vs.size(), 0);
  for (std::size_t i = 1; i < vs.size(); ++i) pre[i] = pre[i - 1] + g.edge(*g.find_edge(vs[i - 1], vs[i])).w;
  const Dist total = pre.back();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Dist a = pre[i], b = total - pre[i];
    if (p.lambda > 0 && (a <= p.lambda || b <= p.lambda)) continue;
    if (a > add_sat(mul_sat(from_s[vs[i]], 4), p.lambda) || b > add_sat(mul_sat(to_t[vs[i]], 4), p.lambda)) {
      if (why) *why = "bound fails at position " + std::to_string(i);
      return false;
    }
  }
  return true;
}

}  // namespace ftdso::testing
