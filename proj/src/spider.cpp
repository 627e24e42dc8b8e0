#include "cc/spider.hpp"

#include <cstdlib>
#include <stdexcept>

namespace cc {

std::string to_string(BranchValue v) {
  return v.is_bottom() ? "bot" : std::to_string(v.value());
}

std::string to_string(const Vertex& d) {
  return "(" + to_string(d.value) + "," + std::to_string(d.grade) + ")";
}

namespace {

void require_vertex(const Vertex& d, const TaskSpec& spec) {
  if (!spec.valid_vertex(d))
    throw std::invalid_argument("not a vertex of this spider graph: " +
                                to_string(d));
}

}  // namespace

int distance(const Vertex& a, const Vertex& b, const TaskSpec& spec) {
  require_vertex(a, spec);
  require_vertex(b, spec);
  if (a == b) return 0;
  if (spec.centered) {
    // Treat the center as grade 0 on every branch.
    if (a.value == b.value || a.value.is_bottom() || b.value.is_bottom())
      return std::abs(a.grade - b.grade);
    return a.grade + b.grade;  // through the center
  }
  // Centerless: clique on the grade-1 vertices, paths outward.
  if (a.value == b.value) return std::abs(a.grade - b.grade);
  return (a.grade - 1) + 1 + (b.grade - 1);
}

std::set<Vertex> minimal_subtree(const TaskSpec& spec,
                                 const std::set<Value>& leaves) {
  if (leaves.empty()) throw std::invalid_argument("empty leaf set");
  for (Value v : leaves)
    if (v < 0 || v >= spec.value_count)
      throw std::invalid_argument("leaf value out of range");
  const int r = spec.refinement;
  std::set<Vertex> out;
  if (leaves.size() == 1) {
    out.insert(branch_vertex(*leaves.begin(), r));
    return out;
  }
  for (Value v : leaves)
    for (int g = 1; g <= r; ++g) out.insert(branch_vertex(v, g));
  if (spec.centered) out.insert(center_vertex());
  return out;
}

std::vector<Vertex> all_vertices(const TaskSpec& spec) {
  std::vector<Vertex> vs;
  if (spec.centered) vs.push_back(center_vertex());
  for (Value v = 0; v < spec.value_count; ++v)
    for (int g = 1; g <= spec.refinement; ++g) vs.push_back(branch_vertex(v, g));
  return vs;
}

std::vector<std::vector<int>> adjacency(const TaskSpec& spec) {
  const auto vs = all_vertices(spec);
  auto index = [&](const Vertex& d) {
    for (int i = 0; i < static_cast<int>(vs.size()); ++i)
      if (vs[i] == d) return i;
    throw std::logic_error("vertex not found");
  };
  std::vector<std::vector<int>> adj(vs.size());
  auto link = [&](const Vertex& a, const Vertex& b) {
    int i = index(a), j = index(b);
    adj[i].push_back(j);
    adj[j].push_back(i);
  };
  for (Value v = 0; v < spec.value_count; ++v) {
    for (int g = 1; g < spec.refinement; ++g)
      link(branch_vertex(v, g), branch_vertex(v, g + 1));
    if (spec.centered) link(center_vertex(), branch_vertex(v, 1));
  }
  if (!spec.centered)
    for (Value u = 0; u < spec.value_count; ++u)
      for (Value v = u + 1; v < spec.value_count; ++v)
        link(branch_vertex(u, 1), branch_vertex(v, 1));
  return adj;
}

}  // namespace cc
