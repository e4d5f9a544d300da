#pragma once

#include <optional>
#include <vector>

#include "renorm/angle.hpp"
#include "renorm/poly.hpp"

namespace renorm {

// Angle along a curve in log-Boettcher coordinates, as a function of potential G:
// theta(G) = base + offset + slope * G  (turns). Rays have offset = slope = 0.
struct CurveAngle {
  Angle base;
  double offset = 0.0;
  double slope = 0.0;
};

// Inverse-Boettcher machinery for a monic polynomial with connected Julia set.
class BoettcherSolver {
 public:
  explicit BoettcherSolver(const Polynomial& P);

  const Polynomial& poly() const noexcept { return P_; }
  double far_radius() const noexcept { return far_radius_; }
  double big_potential() const noexcept { return big_potential_; }

  // log phi(w) for |w| >= far_radius, by the telescoping product.
  Complex log_phi_far(Complex w) const;
  // Two-term asymptotic inverse of phi, accurate for very large |w|.
  Complex psi_far(Complex w) const;

  // Point with potential e^{log_g} and angle theta(G), Newton-solved from `guess`.
  std::optional<Complex> solve(double log_g, const CurveAngle& angle, Complex guess) const;

  // Same target, from a far-field guess; only valid when the curve is short.
  std::optional<Complex> solve_cold(double log_g, const CurveAngle& angle) const;

  // dz/dL where L = log phi, evaluated at z with P^n(z) far out.
  Complex dz_dL(Complex z, int n) const;

  // dz/d(log G) along the curve through z.
  Complex tangent(double log_g, const CurveAngle& angle, Complex z) const;

  // Number of iterates used for a target at potential e^{log_g}.
  int depth_for(double log_g) const;

  // L = G + 2 pi i theta of a basin point, by continuation outward along its ray.
  std::optional<Complex> log_boettcher(Complex z) const;

 private:
  Complex target(double log_g, const CurveAngle& angle, int n) const;
  std::optional<Complex> newton(Complex W, int n, Complex guess) const;

  Polynomial P_;
  int d_;
  double log_d_;
  double far_radius_;
  double big_potential_;
  Complex c0_, c1_;
};

struct Landing {
  Complex point{};
  bool converged = false;
};

struct RayPolyline {
  Angle angle;
  std::vector<Complex> points;
  std::vector<double> potentials;
  std::optional<Landing> landing;
  // Tracing stopped early because consecutive points became indistinguishable in
  // double precision (strongly repelling landing points).
  bool resolution_limited = false;
};

struct TraceOptions {
  int substeps = 8;
  int max_halvings = 20;
};

struct TracedCurve {
  std::vector<Complex> points;
  std::vector<double> log_potentials;
  std::vector<Complex> tangents;  // dz / d(log G)
  bool resolution_limited = false;
};

// Traces the curve theta(G) at potentials e^{log_start - k h}, h = log d / substeps,
// down to e^{log_end}. Starts internally far out when needed; throws BranchJump or
// NonConvergence with the partial curve discarded.
TracedCurve trace_curve(const BoettcherSolver& B, const CurveAngle& angle, double log_start,
                        double log_end, const TraceOptions& opts = {});

RayPolyline trace_ray(const Polynomial& P, const Angle& theta, double g_start, double g_end,
                      int substeps = 8);
RayPolyline trace_ray(const BoettcherSolver& B, const Angle& theta, double g_start, double g_end,
                      int substeps = 8);

// Throws NotConverged when the tail neither contracts geometrically nor passes the
// slow (parabolic) Cauchy test.
Landing landing_point(const RayPolyline& ray, const Polynomial& P);
Landing landing_point(const RayPolyline& ray, const BoettcherSolver& B);

// Samples of the equipotential {G} at angles base + offset0 + span * k / n, k = 0..n,
// by continuation in angle from a single far-field start.
struct ArcSamples {
  std::vector<Complex> points;
  std::vector<Complex> dz_dtheta;
  std::vector<double> angles;  // offsets from base, in turns
};
ArcSamples equipotential_arc(const BoettcherSolver& B, double G, const Angle& base, double offset0,
                             double span, int n);

// Closed equipotential at potential G0, n points ordered by angle k/n.
std::vector<Complex> equipotential_polyline(const Polynomial& P, double G0, int n);
std::vector<Complex> equipotential_polyline(const BoettcherSolver& B, double G0, int n);

}  // namespace renorm
