#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace cc {

/// Dense index into the ordered value set V, 0 <= id < |V|.
using Value = int;

/// An element of V u {bot}.
class BranchValue {
 public:
  constexpr BranchValue() : raw_(-1) {}
  explicit constexpr BranchValue(Value v) : raw_(v) {
    if (v < 0) throw std::invalid_argument("value id must be non-negative");
  }

  static constexpr BranchValue bottom() { return BranchValue(); }

  constexpr bool is_bottom() const { return raw_ < 0; }
  constexpr Value value() const {
    if (is_bottom()) throw std::logic_error("bottom has no value id");
    return raw_;
  }
  /// -1 for bottom, else the value id. Used for compact encodings.
  constexpr int raw() const { return raw_; }

  friend constexpr auto operator<=>(BranchValue, BranchValue) = default;

 private:
  int raw_;
};

/// A decision point (value, grade) on the spider graph.
/// The center (bot, 0) is the unique grade-0 vertex; branch vertices carry
/// a value and a grade in [1, R].
struct Vertex {
  BranchValue value;
  int grade = 0;

  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline Vertex center_vertex() { return Vertex{BranchValue::bottom(), 0}; }
inline Vertex branch_vertex(Value v, int grade) {
  return Vertex{BranchValue(v), grade};
}

enum class FailureModel { crash, malicious };

/// One problem instance: value set size, refinement, graph shape, and the
/// process/fault budget.
struct TaskSpec {
  int value_count = 2;  // |V| >= 2
  int refinement = 1;   // R in {1, 2}
  bool centered = true;
  int n = 0;
  int f = 0;
  FailureModel failure_model = FailureModel::crash;

  friend constexpr auto operator<=>(const TaskSpec&, const TaskSpec&) = default;

  void validate() const {
    if (value_count < 2) throw std::invalid_argument("need |V| >= 2");
    if (refinement != 1 && refinement != 2)
      throw std::invalid_argument("refinement must be 1 or 2");
    if (n <= 0 || f < 0 || f >= n)
      throw std::invalid_argument("need 0 <= f < n");
  }

  /// True iff (value, grade) labels a vertex of this spec's graph.
  bool valid_vertex(const Vertex& d) const {
    if (d.value.is_bottom()) return centered && d.grade == 0;
    if (d.value.value() >= value_count) return false;
    return d.grade >= 1 && d.grade <= refinement;
  }
};

std::string to_string(BranchValue v);
std::string to_string(const Vertex& d);

}  // namespace cc
