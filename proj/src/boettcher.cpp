#include "renorm/boettcher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "renorm/error.hpp"

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double binomial2(int d) { return 0.5 * d * (d - 1); }

}  // namespace

BoettcherSolver::BoettcherSolver(const Polynomial& P) : P_(P), d_(P.degree()) {
  log_d_ = std::log(static_cast<double>(d_));
  far_radius_ = 10.0 * P_.escape_radius();
  big_potential_ = std::max(20.0, d_ * std::log(far_radius_) + 1.0);
  const auto& a = P_.coeffs();
  c0_ = a[d_ - 1] / static_cast<double>(d_);
  if (d_ == 2)
    c1_ = (a[0] + c0_ - c0_ * c0_) / 2.0;
  else
    c1_ = (a[d_ - 2] - binomial2(d_) * c0_ * c0_) / static_cast<double>(d_);
}

Complex BoettcherSolver::log_phi_far(Complex w) const {
  const auto& a = P_.coeffs();
  Complex L = std::log(w);
  double scale = 1.0;
  for (int k = 0; k < 200; ++k) {
    // P(w) / w^d evaluated in powers of 1/w to stay finite.
    const Complex u = 1.0 / w;
    Complex r = 0.0;
    for (int j = 0; j <= d_; ++j) r = r * u + a[j];
    scale /= d_;
    const Complex term = scale * std::log(r);
    L += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(L))) break;
    const Complex next = P_(w);
    if (!finite(next)) break;
    w = next;
  }
  return L;
}

Complex BoettcherSolver::psi_far(Complex w) const { return w - c0_ - c1_ / w; }

int BoettcherSolver::depth_for(double log_g) const {
  const double need = (std::log(big_potential_) - log_g) / log_d_;
  return need <= 0.0 ? 0 : static_cast<int>(std::ceil(need));
}

Complex BoettcherSolver::target(double log_g, const CurveAngle& angle, int n) const {
  const double Gn = std::exp(log_g + n * log_d_);
  const double dn = std::exp(n * log_d_);
  const double theta = angle.base.times_power(d_, n).turns() + dn * angle.offset + angle.slope * Gn;
  return psi_far(std::exp(Complex(Gn, kTwoPi * frac_turns(theta))));
}

std::optional<Complex> BoettcherSolver::newton(Complex W, int n, Complex z) const {
  double prev = HUGE_VAL;
  for (int it = 0; it < 80; ++it) {
    const auto j = iterate_jet(P_, z, n);
    if (!finite(j.value) || !finite(j.d1) || j.d1 == 0.0) return std::nullopt;
    const Complex step = std::log(j.value / W) * j.value / j.d1;
    if (!finite(step)) return std::nullopt;
    z -= step;
    const double size = std::abs(step), scale = std::max(1.0, std::abs(z));
    // Stop at round-off: either tiny, or small and no longer shrinking quadratically.
    if (size <= 1e-15 * scale || (size <= 1e-11 * scale && size > 0.25 * prev)) return z;
    prev = size;
  }
  return std::nullopt;
}

std::optional<Complex> BoettcherSolver::solve(double log_g, const CurveAngle& angle,
                                              Complex guess) const {
  const int n = depth_for(log_g);
  return newton(target(log_g, angle, n), n, guess);
}

std::optional<Complex> BoettcherSolver::solve_cold(double log_g, const CurveAngle& angle) const {
  const double G = std::exp(log_g);
  const double theta = angle.base.turns() + angle.offset + angle.slope * G;
  return solve(log_g, angle, psi_far(std::exp(Complex(G, kTwoPi * theta))));
}

Complex BoettcherSolver::dz_dL(Complex z, int n) const {
  const auto j = iterate_jet(P_, z, n);
  return std::exp(n * log_d_) * j.value / j.d1;
}

Complex BoettcherSolver::tangent(double log_g, const CurveAngle& angle, Complex z) const {
  const double G = std::exp(log_g);
  return G * Complex(1.0, kTwoPi * angle.slope) * dz_dL(z, depth_for(log_g));
}

std::optional<Complex> BoettcherSolver::log_boettcher(Complex z) const {
  const double G = green_potential(P_, z, 4000);
  if (G <= 0.0) return std::nullopt;
  Complex u = z;
  double log_gu = std::log(G);
  const double h = log_d_ / 4.0;
  for (int guard = 0; guard < 4000 && std::abs(u) < far_radius_; ++guard) {
    const int m = depth_for(log_gu);
    const Complex um = iterate(P_, u, m);
    const Complex Lm = log_phi_far(um);
    const Complex dzdL = dz_dL(u, m);
    double delta = std::min(h, std::log1p(0.25 / std::exp(log_gu)));
    bool moved = false;
    for (int halving = 0; halving <= 20; ++halving, delta *= 0.5) {
      const double dG = std::exp(log_gu) * std::expm1(delta);
      const Complex pred = u + dG * dzdL;
      const Complex W = psi_far(std::exp(Lm + std::exp(m * log_d_) * dG));
      const auto w = newton(W, m, pred);
      if (w && std::abs(*w - pred) <= 0.5 * std::abs(pred - u)) {
        u = *w;
        log_gu += delta;
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
  }
  if (std::abs(u) < far_radius_) return std::nullopt;
  const Complex L = log_phi_far(u);
  return Complex(G, kTwoPi * frac_turns(L.imag() / kTwoPi));
}

namespace {

enum class Advance { Ok, Resolved, Failed };

// Advances from (z, log_g) to `log_target` along the curve with Euler prediction,
// Newton correction and step halving. Sub-steps are capped so that one step moves
// log phi by at most kMaxDL, which keeps the linear predictor on the right sheet far
// out. Resolved means the curve has shrunk below floating-point resolution.
constexpr double kMaxDL = 0.25;

Advance advance(const BoettcherSolver& B, const CurveAngle& angle, Complex& z, double& log_g,
                double log_target, int max_halvings) {
  const double speed = std::abs(Complex(1.0, kTwoPi * angle.slope));
  double delta = log_target - log_g;
  int halvings = 0;
  while (log_g - log_target > 1e-13) {
    const double G = std::exp(log_g);
    const double cap = std::log1p(kMaxDL / (G * speed));
    delta = std::max({delta, log_target - log_g, -cap});
    const Complex pred = z + std::expm1(delta) * B.tangent(log_g, angle, z);
    if (std::abs(pred - z) < 8.0 * 2.2e-16 * std::max(1.0, std::abs(z))) return Advance::Resolved;
    const double next_level = (log_target - (log_g + delta) > -1e-13) ? log_target : log_g + delta;
    const auto w = B.solve(next_level, angle, pred);
    if (w && std::abs(*w - pred) <= 0.5 * std::abs(pred - z)) {
      z = *w;
      log_g = next_level;
      continue;
    }
    if (++halvings > max_halvings) return Advance::Failed;
    delta *= 0.5;
  }
  return Advance::Ok;
}

}  // namespace

TracedCurve trace_curve(const BoettcherSolver& B, const CurveAngle& angle, double log_start,
                        double log_end, const TraceOptions& opts) {
  if (!(log_start >= log_end)) throw Error(ErrorCode::InvalidInput, "curve start below end");
  if (opts.substeps < 1) throw Error(ErrorCode::InvalidInput, "substeps must be >= 1");
  const double h = std::log(static_cast<double>(B.poly().degree())) / opts.substeps;
  const int K = static_cast<int>(std::floor((log_start - log_end) / h + 1e-9));
  const double log_far = std::log(std::log(B.far_radius()));
  const int J = log_start >= log_far ? 0 : static_cast<int>(std::ceil((log_far - log_start) / h));

  double log_g = log_start + J * h;
  auto first = B.solve_cold(log_g, angle);
  if (!first) throw Error(ErrorCode::NonConvergence, "far-field start of curve did not converge");
  Complex z = *first;

  TracedCurve out;
  out.points.reserve(K + 1);
  for (int k = -J; k <= K; ++k) {
    const double level = log_start - k * h;
    if (k > -J) {
      const auto status = advance(B, angle, z, log_g, level, opts.max_halvings);
      if (status == Advance::Resolved && k > 0) {
        out.resolution_limited = true;
        break;
      }
      if (status != Advance::Ok)
        throw Error(ErrorCode::BranchJump,
                    "step refinement exhausted at potential " + std::to_string(std::exp(log_g)) +
                        " after " + std::to_string(out.points.size()) + " good points");
    }
    if (k >= 0) {
      out.points.push_back(z);
      out.log_potentials.push_back(level);
      out.tangents.push_back(B.tangent(level, angle, z));
    }
  }
  return out;
}

RayPolyline trace_ray(const BoettcherSolver& B, const Angle& theta, double g_start, double g_end,
                      int substeps) {
  if (!(g_start > g_end && g_end > 0.0))
    throw Error(ErrorCode::InvalidInput, "need g_start > g_end > 0");
  TraceOptions opts;
  opts.substeps = substeps;
  const auto curve = trace_curve(B, CurveAngle{theta}, std::log(g_start), std::log(g_end), opts);
  RayPolyline ray;
  ray.angle = theta;
  ray.points = curve.points;
  for (double lg : curve.log_potentials) ray.potentials.push_back(std::exp(lg));
  ray.resolution_limited = curve.resolution_limited;
  if (ray.potentials.back() < 1e-8 || ray.resolution_limited) {
    try {
      ray.landing = landing_point(ray, B);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotConverged) throw;
      ray.landing = Landing{ray.points.back(), false};
    }
  }
  return ray;
}

RayPolyline trace_ray(const Polynomial& P, const Angle& theta, double g_start, double g_end,
                      int substeps) {
  return trace_ray(BoettcherSolver(P), theta, g_start, g_end, substeps);
}

namespace {

struct PolishJet {
  Complex f, f1, f2;
};

template <class JetFn>
std::optional<Complex> polish_root(Complex z, JetFn&& jet) {
  for (int it = 0; it < 100; ++it) {
    const auto j = jet(z);
    if (!finite(j.f)) return std::nullopt;
    if (j.f == 0.0) return z;
    const Complex den = j.f1 * j.f1 - j.f * j.f2;
    const Complex step = den != 0.0 ? j.f * j.f1 / den : (j.f1 != 0.0 ? j.f / j.f1 : 0.0);
    if (!finite(step)) return std::nullopt;
    z -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) return z;
  }
  return z;
}

// Periodic point of the landing cycle near w0 (smallest period m | p that fits),
// then the preimage under P^l near the ray tail.
std::optional<Complex> polish_landing(const Polynomial& P, const Angle& angle, Complex tail,
                                      double radius) {
  const auto orbit = tuple_orbit(angle, P.degree());
  const int l = orbit.preperiod, p = orbit.period;
  const Complex w0 = iterate(P, tail, l);
  std::optional<Complex> w_star;
  for (int m = 1; m <= p && !w_star; ++m) {
    if (p % m) continue;
    auto w = polish_root(w0, [&](Complex x) {
      const auto j = iterate_jet(P, x, m);
      return PolishJet{j.value - x, j.d1 - 1.0, j.d2};
    });
    if (w && std::abs(iterate(P, *w, m) - *w) < 1e-10 * std::max(1.0, std::abs(*w)) &&
        std::abs(*w - w0) < std::max(radius, 1e-9) * 1e3)
      w_star = w;
  }
  if (!w_star) return std::nullopt;
  if (l == 0) return std::abs(*w_star - tail) <= radius ? w_star : std::nullopt;
  auto z = polish_root(tail, [&](Complex x) {
    const auto j = iterate_jet(P, x, l);
    return PolishJet{j.value - *w_star, j.d1, j.d2};
  });
  if (z && std::abs(*z - tail) <= radius) return z;
  return std::nullopt;
}

}  // namespace

Landing landing_point(const RayPolyline& ray, const BoettcherSolver& B) {
  const auto& pts = ray.points;
  if (pts.size() < 10 || (ray.potentials.back() >= 1e-8 && !ray.resolution_limited))
    throw Error(ErrorCode::InvalidInput,
                "ray must reach potential 1e-8 (or floating-point resolution) with >= 10 points");
  const std::size_t n = pts.size();
  const double first = std::abs(pts[n - 9] - pts[n - 10]);
  const double last = std::abs(pts[n - 1] - pts[n - 2]);
  const double ratio = first > 0.0 ? std::pow(last / first, 1.0 / 8.0) : 0.0;
  const Polynomial& P = B.poly();

  if (ratio < 0.95) {
    const Complex tail = pts[n - 1] + (pts[n - 1] - pts[n - 2]) * (ratio / (1.0 - ratio));
    const double radius = std::max(1e-7, 100.0 * last);
    if (auto z = polish_landing(P, ray.angle, tail, radius)) return {*z, true};
    return {tail, true};
  }

  // Slow (parabolic) approach: keep tracing at coarse spacing until the per-level
  // displacement stays under the Cauchy tolerance.
  const int d = P.degree();
  const double h = std::log(static_cast<double>(d)) / 2.0;
  Complex z = pts.back();
  double log_g = std::log(ray.potentials.back());
  int quiet = 0;
  for (int level = 0; level < 10000; ++level) {
    const Complex before = z;
    if (advance(B, CurveAngle{ray.angle}, z, log_g, log_g - h, 20) != Advance::Ok) break;
    quiet = std::abs(z - before) < 1e-5 ? quiet + 1 : 0;
    if (quiet >= 10) {
      if (auto a = polish_landing(P, ray.angle, z, 0.1)) return {*a, true};
      break;
    }
  }
  throw Error(ErrorCode::NotConverged, "ray " + ray.angle.str() + " tail does not contract");
}

Landing landing_point(const RayPolyline& ray, const Polynomial& P) {
  return landing_point(ray, BoettcherSolver(P));
}

ArcSamples equipotential_arc(const BoettcherSolver& B, double G, const Angle& base, double offset0,
                             double span, int n) {
  if (!(G > 0.0) || n < 1) throw Error(ErrorCode::InvalidInput, "need G > 0 and n >= 1");
  const double log_g = std::log(G);
  const int depth = B.depth_for(log_g);
  TraceOptions opts;
  opts.substeps = 4;
  Complex z = trace_curve(B, CurveAngle{base, offset0}, log_g, log_g, opts).points.back();
  auto slope = [&](Complex x) { return Complex(0.0, kTwoPi) * B.dz_dL(x, depth); };
  ArcSamples out;
  out.points.push_back(z);
  out.dz_dtheta.push_back(slope(z));
  out.angles.push_back(offset0);
  double at = offset0;
  for (int k = 1; k <= n; ++k) {
    const double goal = offset0 + span * k / n;
    double step = goal - at;
    int halvings = 0;
    while (std::abs(goal - at) > 1e-15) {
      if (std::abs(step) > std::abs(goal - at)) step = goal - at;
      const Complex pred = z + step * slope(z);
      const auto w = B.solve(log_g, CurveAngle{base, at + step}, pred);
      if (w && std::abs(*w - pred) <= 0.5 * std::abs(pred - z)) {
        z = *w;
        at += step;
        continue;
      }
      if (++halvings > 30)
        throw Error(ErrorCode::NonConvergence, "equipotential continuation failed");
      step *= 0.5;
    }
    out.points.push_back(z);
    out.dz_dtheta.push_back(slope(z));
    out.angles.push_back(goal);
  }
  return out;
}

std::vector<Complex> equipotential_polyline(const BoettcherSolver& B, double G0, int n) {
  if (!(G0 > 0.0) || n < 64) throw Error(ErrorCode::InvalidInput, "need G0 > 0 and n >= 64");
  auto arc = equipotential_arc(B, G0, Angle(0, 1), 0.0, 1.0, n);
  arc.points.pop_back();
  return arc.points;
}

std::vector<Complex> equipotential_polyline(const Polynomial& P, double G0, int n) {
  return equipotential_polyline(BoettcherSolver(P), G0, n);
}

}  // namespace renorm
