#pragma once

#include <boost/rational.hpp>

#include "cc/types.hpp"

namespace cc {

using Rational = boost::rational<long long>;

/// epsilon-approximate agreement on [0,1] via connected consensus with
/// V = {0,1} and R = ceil(1/(2*epsilon)). Only R <= 2 (epsilon >= 1/4) is
/// supported by the implemented protocols.
struct ApproxSpec {
  Rational epsilon;
  int derived_refinement;
};

ApproxSpec make_approx_spec(const Rational& epsilon);

/// Centered-to-centerless adapter: the center maps to grade 1 on the
/// adapting process's own input branch; everything else passes through.
Vertex centerless_adapt(const Vertex& decision, Value own_input);

/// Maps the chain (0,R),...,(0,1),(bot,0),(1,1),...,(1,R) to equally spaced
/// points of [0,1], with (0,R) at 0 and (1,R) at 1.
Rational approx_decode(const Vertex& decision, const ApproxSpec& spec);

}  // namespace cc
