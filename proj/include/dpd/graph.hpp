// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <utility>
#include <vector>

namespace dpd {

// Undirected communication graph over agents 0..n-1. Edges are stored as
// normalized (min,max) pairs, deduplicated and sorted, so construction is
// order-independent. Connectivity is computed once by traversal; a
// disconnected graph is reported through validate(), not rejected here.
class CommGraph {
 public:
  CommGraph(int n_nodes, const std::vector<std::pair<int, int>>& edges);

  int n_nodes() const { return n_nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  bool connected() const { return connected_; }

 private:
  int n_nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  bool connected_;
};

}  // namespace dpd
