#pragma once

#include <cstdint>
#include <string>

#include "ftdso/graph.hpp"

namespace ftdso {

Graph make_er(int n, double p, std::uint64_t seed);
Graph make_grid(int w, int h);
Graph make_rgg(int n, double r, std::uint64_t seed);
Graph make_path(int n);
Graph make_cycle(int n);

// Induced subgraph on the largest connected component, relabelled densely.
Graph largest_component(const Graph& g);
bool is_connected(const Graph& g);

// Parses "er:N:P", "grid:W:H", "rgg:N:R" (seed applies to random families).
Graph generate_from_spec(const std::string& spec, std::uint64_t seed, bool connected_only = false);

}  // namespace ftdso
