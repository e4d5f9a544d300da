#pragma once

#include <cstdint>
#include <vector>

#include "renorm/poly.hpp"

namespace renorm {

using Polyline = std::vector<Complex>;

double distance_to_segment(Complex p, Complex a, Complex b) noexcept;
double distance_to_polygon(Complex p, const Polyline& closed) noexcept;

// Even-odd crossing test; the polygon is implicitly closed.
bool crossing_inside(Complex p, const Polyline& closed) noexcept;

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) noexcept;

// True when no two non-adjacent edges of the closed polygon intersect.
bool is_simple_polygon(const Polyline& closed);

// Minimum distance from p to a sampled open polyline.
double distance_to_polyline(Complex p, const Polyline& line) noexcept;

// Uniform-grid accelerator for point-in-polygon queries. Cells that no edge touches
// are classified once; only boundary cells fall back to the exact crossing test.
// Points within `margin` of the boundary report as outside.
class PolygonIndex {
 public:
  PolygonIndex() = default;
  PolygonIndex(Polyline closed, int cells = 512, double margin = 1e-9);

  bool contains(Complex p) const noexcept;
  const Polyline& polygon() const noexcept { return poly_; }
  Complex lower() const noexcept { return lo_; }
  Complex upper() const noexcept { return hi_; }
  bool empty() const noexcept { return poly_.size() < 3; }

 private:
  enum : std::uint8_t { kOutside = 0, kInside = 1, kBoundary = 2 };
  bool exact(Complex p) const noexcept;

  Polyline poly_;
  Complex lo_{}, hi_{};
  int n_ = 0;
  double cw_ = 1.0, ch_ = 1.0;
  double margin_ = 1e-9;
  std::vector<std::uint8_t> cell_;
  std::vector<std::vector<int>> edges_;
};

}  // namespace renorm
