// Copyright 2026 The qsync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small undirected-graph helpers shared by the quantum interaction graph and
// the classical consensus systems. Vertices are 0-based.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace qsync {

using VertexPair = std::pair<int, int>;

/// True when every vertex in [0, vertices) is reachable from vertex 0.
/// Zero or one vertex counts as connected.
inline bool is_connected(int vertices, const std::vector<VertexPair> &edges) {
  if (vertices <= 1) {
    return true;
  }
  std::vector<int> parent(static_cast<std::size_t>(vertices));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  int components = vertices;
  for (auto [a, b] : edges) {
    int ra = find(a);
    int rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

/// Largest vertex degree, counting parallel edges with multiplicity.
inline int max_degree(int vertices, const std::vector<VertexPair> &edges) {
  std::vector<int> degree(static_cast<std::size_t>(std::max(vertices, 0)), 0);
  for (auto [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

/// Random connected simple graph: a uniformly random labelled spanning tree
/// (decoded from a random Pruefer sequence) plus every remaining vertex pair
/// independently with probability `extra_edge_probability`. Edges come back
/// sorted with a < b.
template <class Rng>
std::vector<VertexPair> random_connected_edges(int vertices,
                                               double extra_edge_probability,
                                               Rng &rng) {
  std::vector<VertexPair> edges;
  if (vertices <= 1) {
    return edges;
  }
  if (vertices == 2) {
    edges.emplace_back(0, 1);
  } else {
    std::uniform_int_distribution<int> pick(0, vertices - 1);
    std::vector<int> code(static_cast<std::size_t>(vertices - 2));
    for (auto &c : code) {
      c = pick(rng);
    }
    std::vector<int> degree(static_cast<std::size_t>(vertices), 1);
    for (int c : code) {
      ++degree[c];
    }
    for (int c : code) {
      int leaf = 0;
      while (degree[leaf] != 1) {
        ++leaf;
      }
      edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
      --degree[leaf];
      --degree[c];
    }
    int u = -1;
    for (int v = 0; v < vertices; ++v) {
      if (degree[v] == 1) {
        if (u < 0) {
          u = v;
        } else {
          edges.emplace_back(u, v);
          break;
        }
      }
    }
  }
  std::bernoulli_distribution extra(extra_edge_probability);
  for (int a = 0; a < vertices; ++a) {
    for (int b = a + 1; b < vertices; ++b) {
      if (std::find(edges.begin(), edges.end(), VertexPair{a, b}) ==
              edges.end() &&
          extra(rng)) {
        edges.emplace_back(a, b);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

} // namespace qsync
