#include "cc/reductions.hpp"

#include <stdexcept>

namespace cc {

ApproxSpec make_approx_spec(const Rational& epsilon) {
  if (epsilon <= Rational(0) || epsilon > Rational(1, 2))
    throw std::invalid_argument("epsilon must be in (0, 1/2]");
  // ceil(1 / (2 eps)) in exact arithmetic.
  Rational inv = Rational(1) / (Rational(2) * epsilon);
  long long r = inv.numerator() / inv.denominator();
  if (Rational(r) < inv) ++r;
  if (r > 2)
    throw std::invalid_argument(
        "epsilon needs refinement > 2, which no implemented protocol provides");
  return ApproxSpec{epsilon, static_cast<int>(r)};
}

Vertex centerless_adapt(const Vertex& decision, Value own_input) {
  if (decision.value.is_bottom()) return branch_vertex(own_input, 1);
  return decision;
}

Rational approx_decode(const Vertex& decision, const ApproxSpec& spec) {
  const int r = spec.derived_refinement;
  long long index;  // position along the 2R+1 chain
  if (decision.value.is_bottom()) {
    index = r;
  } else if (decision.value.value() == 0) {
    index = r - decision.grade;
  } else if (decision.value.value() == 1) {
    index = r + decision.grade;
  } else {
    throw std::invalid_argument("approx reduction needs V = {0,1}");
  }
  if (index < 0 || index > 2 * r)
    throw std::invalid_argument("decision grade exceeds refinement");
  return Rational(index, 2 * r);
}

}  // namespace cc
