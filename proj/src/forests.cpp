#include "lcm/forests.hpp"

#include <algorithm>
#include <functional>

#include "lcm/errors.hpp"

namespace lcm {

namespace {

// Union-find without path compression so unions can be undone by resetting a
// single parent slot. Sizes here are tiny; simplicity wins.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(static_cast<std::size_t>(n) + 1) {
    for (int v = 0; v <= n; ++v) parent[static_cast<std::size_t>(v)] = v;
  }
  int find(int v) const {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
    return v;
  }
};

}  // namespace

std::vector<Forest> spanning_incoming_forests(int n, const std::vector<Edge>& edges, int ell,
                                              std::optional<std::pair<int, int>> connect) {
  if (ell < 0) throw InputError("spanning_incoming_forests: negative forest size");
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());

  std::vector<Forest> out;
  if (ell > n) return out;

  Dsu dsu(n);
  std::vector<char> out_used(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Edge> chosen;
  int total = static_cast<int>(sorted.size());

  auto accept = [&]() {
    if (connect) {
      auto [j, i] = *connect;
      if (dsu.find(j) != dsu.find(i)) return;
    }
    out.push_back(Forest{chosen});
  };

  // Depth-first over the edge list: at index `idx` either take the edge (if
  // it keeps the partial set a forest) or skip it.
  std::function<void(int)> walk = [&](int idx) {
    if (static_cast<int>(chosen.size()) == ell) {
      accept();
      return;
    }
    if (idx >= total) return;
    if (total - idx < ell - static_cast<int>(chosen.size())) return;

    const Edge& e = sorted[static_cast<std::size_t>(idx)];
    if (!out_used[static_cast<std::size_t>(e.from)]) {
      int rf = dsu.find(e.from), rt = dsu.find(e.to);
      if (rf != rt) {
        out_used[static_cast<std::size_t>(e.from)] = 1;
        dsu.parent[static_cast<std::size_t>(rf)] = rt;
        chosen.push_back(e);
        walk(idx + 1);
        chosen.pop_back();
        dsu.parent[static_cast<std::size_t>(rf)] = rf;
        out_used[static_cast<std::size_t>(e.from)] = 0;
      }
    }
    walk(idx + 1);
  };
  walk(0);
  return out;
}

}  // namespace lcm
