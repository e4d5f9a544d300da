#pragma once

#include <optional>
#include <vector>

#include "renorm/boettcher.hpp"
#include "renorm/cuts.hpp"
#include "renorm/geometry.hpp"
#include "renorm/poly.hpp"

namespace renorm {

// Disk-model region rho0 <= rho <= exp(-|theta - theta0|) with the angular
// coordinate in radians; theta and theta0 are passed in turns.
struct ProtoCarrot {
  double rho0 = 0.9;
  double theta0 = 0.0;
};

bool proto_contains(const ProtoCarrot& pc, double rho, double theta) noexcept;

// Largest distance from the image of a boundary sample under (rho, theta) -> (rho^d,
// d theta) to the boundary of the proto-carrot (rho0^d, d theta0).
double proto_image_check(const ProtoCarrot& pc, int d, int samples);

struct CarrotOptions {
  int substeps = 16;
  double t_min = 1e-12;  // sides are traced down to potential t_min * G_top
  int arc_samples = 512;
  double landing_tol = 1e-6;
};

// C(rho) for one cut: sides theta = theta_r - G/2pi and theta = theta_l + G/2pi
// (turns) for G in (0, G_top], G_top = -log rho, closed by the equipotential arc.
struct Carrot {
  int cut = -1;
  Angle theta_r, theta_l;
  Complex root{};
  double rho = 0.0;
  double g_top = 0.0;
  double arc_length = 0.0;  // |I|

  // Sides run from the equipotential down to the root.
  Polyline side_r, side_l;
  std::vector<double> side_r_log_g, side_l_log_g;
  std::vector<Complex> side_r_tangent, side_l_tangent;  // dz / d(log G)
  bool resolution_limited = false;

  // Equipotential arc from the top of side_r counterclockwise to the top of side_l.
  Polyline equip_arc;
  std::vector<Complex> arc_dz_dtheta;
  double arc_start = 0.0;  // turns, theta_r - G_top / 2pi
  double arc_span = 0.0;   // |I| + G_top / pi

  Polyline boundary;  // root, side_r upward, arc, side_l downward
  PolygonIndex index;

  bool contains(Complex z) const noexcept { return index.contains(z); }
};

Carrot build_carrot(const BoettcherSolver& B, const CutFamily& Z, int cut, double rho,
                    const CarrotOptions& opts = {});

// Carrots for every cut of Z at the same rho, in forward-orbit order per cut.
std::vector<Carrot> build_carrots(const CutFamily& Z, double rho, const CarrotOptions& opts = {},
                                  int threads = 0);

// Side_r and side_l concatenated through the root (side_r top to root, then side_l
// root to top).
Polyline side_pair(const Carrot& C);

// Largest distance from P(side point) to the matching side of `image`, over every
// side node whose image potential lies within the image's traced range.
double carrot_image_deviation(const Polynomial& P, const Carrot& C, const Carrot& image);

// Minimum distance between the boundaries of two carrots; negative when they cross.
double carrot_separation(const Carrot& a, const Carrot& b);

// Cubic Hermite interpolation of a complex function on increasing nodes; linear
// extrapolation beyond both ends.
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(std::vector<double> x, std::vector<Complex> y, std::vector<Complex> dy);

  Complex value(double x) const noexcept;
  Complex derivative(double x) const noexcept;
  double front() const noexcept { return x_.front(); }
  double back() const noexcept { return x_.back(); }

 private:
  std::size_t segment(double x) const noexcept;
  std::vector<double> x_;
  std::vector<Complex> y_, dy_;
};

// Boundary-normalized coordinates on a carrot: s in [0,1] runs from side_r to
// side_l, v = -log(G / G_top) >= 0 runs from the arc towards the root. The interior
// is a Coons blend of the unwrapped logarithms of z - root along the three arcs.
class CarrotChart {
 public:
  explicit CarrotChart(const Carrot& C);

  Complex root() const noexcept { return root_; }
  double v_max() const noexcept { return v_max_; }

  // Unwrapped log(z - root) along side_r (s = 0), side_l (s = 1) and the arc (v = 0).
  Complex log_side_r(double v) const noexcept { return side_r_.value(v); }
  Complex log_side_l(double v) const noexcept { return side_l_.value(v); }
  Complex log_arc(double s) const noexcept { return arc_.value(s); }

  Complex log_at(double s, double v) const noexcept;
  Complex point(double s, double v) const noexcept { return root_ + std::exp(log_at(s, v)); }

  struct Coordinates {
    double s = 0.0, v = 0.0;
  };
  // Chart coordinates of a point of the carrot, or nullopt when none are found.
  // Points just outside the interpolated sides may get s or v slightly out of range.
  std::optional<Coordinates> invert(Complex z) const;

  // Coons blend of arbitrary boundary data, used for both source and image charts.
  static Complex blend(double s, double v, Complex side_r, Complex side_l, Complex arc, Complex corner_r,
                       Complex corner_l) noexcept;

 private:
  void partials(double s, double v, Complex& value, Complex& ds, Complex& dv) const noexcept;

  Complex root_{};
  HermiteTable side_r_, side_l_, arc_;
  double v_max_ = 0.0;
  struct Seed {
    double s, v;
    Complex log;
  };
  std::vector<Seed> seeds_;
};

// Radius of the disk around the cycle point on which the inverse branch of P^p
// fixing it is contracting (sampled estimate).
double linearization_radius(const Polynomial& P, const Cycle& cycle);

// Koenigs coordinate u at the first point z0 of a repelling cycle; u(z0) = 0,
// u'(z0) = 1 and u(P^p z) = lambda u(z). Throws OutsideLinearizationDomain.
Complex koenigs_coordinate(const Polynomial& P, const Cycle& cycle, Complex z);

}  // namespace renorm
