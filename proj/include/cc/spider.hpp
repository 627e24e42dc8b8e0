#pragma once

#include <set>
#include <vector>

#include "cc/types.hpp"

namespace cc {

/// Graph distance between two vertices of the spider graph described by
/// `spec`. Centered graphs route cross-branch paths through the center;
/// centerless graphs (R = 2) connect the grade-1 vertices in a clique.
int distance(const Vertex& a, const Vertex& b, const TaskSpec& spec);

/// Vertex set of the minimal subtree of the spider graph connecting the
/// leaves {(v, R) | v in leaves}.
std::set<Vertex> minimal_subtree(const TaskSpec& spec,
                                 const std::set<Value>& leaves);

inline bool contains(const std::set<Vertex>& subtree, const Vertex& d) {
  return subtree.count(d) != 0;
}

/// All vertices of the graph, in a stable order. Exposed for exhaustive
/// checks and for the explorer.
std::vector<Vertex> all_vertices(const TaskSpec& spec);

/// Adjacency list over all_vertices(spec) indices. This is the reference
/// construction; distance() must agree with BFS over it.
std::vector<std::vector<int>> adjacency(const TaskSpec& spec);

}  // namespace cc
