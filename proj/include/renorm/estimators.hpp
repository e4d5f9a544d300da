#pragma once

#include <utility>
#include <vector>

#include "renorm/geometry.hpp"

namespace renorm {

// Sampled lower bound for the three-point constant C: min over ordered triples
// x < y < z of |x - z| / max(|x - y|, |y - z|). Samples are taken uniformly in the
// vertex index, which concentrates them near the root for potential-ordered sides.
double quasi_arc_constant(const Polyline& line, int samples);

struct TransversalityResult {
  double gap = 0.0;
  int scales = 0;          // dyadic distance bands examined
  std::size_t pairs = 0;   // pairs with comparable distance to the root
  bool transverse = false; // gap above 0.1
};

// Minimum of |(u - a)/(v - a) - 1| over u on R, v on L with distance ratio within
// 10% of 1, in every dyadic band from the largest common distance down to
// `min_scale`. Throws InsufficientSamples when a band has no pairs.
TransversalityResult transversality_gap(const Polyline& R, const Polyline& L, Complex a,
                                        double min_scale = 1e-8);

// max d(fx, fy) / d(fx, fz) over sampled triples with d(x, y) <= d(x, z).
// Needs at least 100 samples; infinite when two distinct samples share an image.
double weak_qs_constant(const std::vector<std::pair<Complex, Complex>>& samples);

struct GeometryEstimate {
  double quasi_arc_C = 0.0;
  double transversality_gap = 0.0;
  double weak_qs_kappa = 1.0;
  int sample_count = 0;
};

}  // namespace renorm
