#ifndef LCM_FORESTS_HPP
#define LCM_FORESTS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "lcm/model.hpp"

namespace lcm {

// Edge set of a spanning incoming forest, sorted by (from, to).
struct Forest {
  std::vector<Edge> edges;
  bool operator==(const Forest&) const = default;
};

/* All ell-edge spanning incoming forests of the digraph: edge subsets where
 * every vertex has at most one outgoing edge and the underlying undirected
 * multigraph is acyclic (so a subset containing both directions of a
 * bidirected pair is never a forest). With `connect` = (j, i), only forests
 * where j and i lie in the same undirected component are kept; the empty
 * forest satisfies that exactly when j = i.
 *
 * Enumeration is a backtracking walk over the lexicographically sorted edge
 * list, so the result is ordered lexicographically by sorted edge list.
 * Throws InputError for ell < 0; ell > n yields no forests. */
std::vector<Forest> spanning_incoming_forests(
    int n, const std::vector<Edge>& edges, int ell,
    std::optional<std::pair<int, int>> connect = std::nullopt);

}  // namespace lcm

#endif
