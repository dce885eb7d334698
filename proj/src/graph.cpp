// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace dpd {

CommGraph::CommGraph(int n_nodes, const std::vector<std::pair<int, int>>& edges) : n_nodes_(n_nodes) {
  if (n_nodes <= 0) throw std::invalid_argument("graph: need at least one node");
  std::set<std::pair<int, int>> normalized;
  for (auto [i, j] : edges) {
    if (i == j) throw std::invalid_argument("graph: self-loop at node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes)
      throw std::invalid_argument("graph: edge endpoint out of range");
    normalized.insert({std::min(i, j), std::max(i, j)});
  }
  edges_.assign(normalized.begin(), normalized.end());
  adjacency_.assign(n_nodes, {});
  for (auto [i, j] : edges_) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());

  std::vector<char> seen(n_nodes, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adjacency_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  connected_ = (count == n_nodes);
}

}  // namespace dpd
