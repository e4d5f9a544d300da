#include "renorm/carrot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "renorm/error.hpp"
#include "renorm/parallel.hpp"

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Turns of external angle per unit potential along a carrot side.
constexpr double kSpiral = 1.0 / kTwoPi;

// theta reduced to (-1/2, 1/2].
double centered(double x) noexcept {
  double r = x - std::floor(x);
  if (r > 0.5) r -= 1.0;
  return r;
}

// Branch of log w nearest to `near`.
Complex log_near(Complex w, Complex near) noexcept {
  Complex l = std::log(w);
  const double k = std::round((near.imag() - l.imag()) / kTwoPi);
  return {l.real(), l.imag() + kTwoPi * k};
}

}  // namespace

bool proto_contains(const ProtoCarrot& pc, double rho, double theta) noexcept {
  const double delta = centered(theta - pc.theta0);
  return pc.rho0 <= rho && rho <= std::exp(-kTwoPi * std::abs(delta));
}

double proto_image_check(const ProtoCarrot& pc, int d, int samples) {
  if (!(pc.rho0 > 0.0 && pc.rho0 < 1.0)) throw Error(ErrorCode::InvalidInput, "rho0 must lie in (0,1)");
  if (d < 1 || samples < 3) throw Error(ErrorCode::InvalidInput, "need d >= 1 and samples >= 3");
  const double g0 = -std::log(pc.rho0);
  const double rho_img = std::pow(pc.rho0, d);
  const double theta_img = pc.theta0 * d;
  const int per = samples / 3;
  double worst = 0.0;
  auto check = [&](double rho, double theta) {
    const double r = std::pow(rho, d);
    const double delta = centered(theta * d - theta_img);
    double dev = std::abs(r - std::exp(-kTwoPi * std::abs(delta)));
    if (std::abs(delta) <= d * g0 * kSpiral + 1e-12) dev = std::min(dev, std::abs(r - rho_img));
    worst = std::max(worst, dev);
  };
  for (int k = 0; k < per; ++k) {
    const double u = static_cast<double>(k) / std::max(1, per - 1);
    const double g = g0 * u;
    check(pc.rho0, pc.theta0 + (2.0 * u - 1.0) * g0 * kSpiral);
    check(std::exp(-g), pc.theta0 - g * kSpiral);
    check(std::exp(-g), pc.theta0 + g * kSpiral);
  }
  return worst;
}

Carrot build_carrot(const BoettcherSolver& B, const CutFamily& Z, int cut, double rho, const CarrotOptions& opts) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidInput, "rho must lie in (0,1)");
  if (cut < 0 || cut >= static_cast<int>(Z.cuts().size())) throw Error(ErrorCode::InvalidInput, "cut index out of range");
  if (!(opts.t_min > 0.0 && opts.t_min < 1.0)) throw Error(ErrorCode::InvalidInput, "t_min must lie in (0,1)");
  const Cut& c = Z.cuts()[cut];
  Carrot C;
  C.cut = cut;
  C.theta_r = c.theta_r;
  C.theta_l = c.theta_l;
  C.root = c.root;
  C.rho = rho;
  C.g_top = -std::log(rho);
  C.arc_length = c.arc_length();

  TraceOptions topts;
  topts.substeps = opts.substeps;
  const double log_top = std::log(C.g_top);
  const double log_end = std::log(C.g_top * opts.t_min);
  const auto r = trace_curve(B, CurveAngle{c.theta_r, 0.0, -kSpiral}, log_top, log_end, topts);
  const auto l = trace_curve(B, CurveAngle{c.theta_l, 0.0, kSpiral}, log_top, log_end, topts);
  C.side_r = r.points;
  C.side_r_log_g = r.log_potentials;
  C.side_r_tangent = r.tangents;
  C.side_l = l.points;
  C.side_l_log_g = l.log_potentials;
  C.side_l_tangent = l.tangents;
  C.resolution_limited = r.resolution_limited || l.resolution_limited;

  const double gap_r = std::abs(C.side_r.back() - C.root), gap_l = std::abs(C.side_l.back() - C.root);
  if (gap_r > opts.landing_tol || gap_l > opts.landing_tol)
    throw Error(ErrorCode::WrongPullback, "carrot sides of (" + c.theta_r.str() + "," + c.theta_l.str() +
                                              ") end " + std::to_string(std::max(gap_r, gap_l)) +
                                              " away from the root");

  C.arc_start = c.theta_r.turns() - C.g_top * kSpiral;
  C.arc_span = C.arc_length + 2.0 * C.g_top * kSpiral;
  const auto arc = equipotential_arc(B, C.g_top, c.theta_r, -C.g_top * kSpiral, C.arc_span, opts.arc_samples);
  C.equip_arc = arc.points;
  C.arc_dz_dtheta = arc.dz_dtheta;
  const double scale = std::max(1.0, std::abs(C.side_r.front()));
  if (std::abs(C.equip_arc.front() - C.side_r.front()) > 1e-8 * scale ||
      std::abs(C.equip_arc.back() - C.side_l.front()) > 1e-8 * scale)
    throw Error(ErrorCode::BranchJump, "carrot arc does not meet the side arcs");

  C.boundary.push_back(C.root);
  for (auto it = C.side_r.rbegin(); it != C.side_r.rend(); ++it)
    if (std::abs(*it - C.root) > 1e-13) C.boundary.push_back(*it);
  for (std::size_t k = 1; k + 1 < C.equip_arc.size(); ++k) C.boundary.push_back(C.equip_arc[k]);
  for (const auto& p : C.side_l)
    if (std::abs(p - C.root) > 1e-13) C.boundary.push_back(p);
  if (!is_simple_polygon(C.boundary))
    throw Error(ErrorCode::BranchJump, "carrot boundary of (" + c.theta_r.str() + "," + c.theta_l.str() +
                                           ") is not a simple closed curve");
  C.index = PolygonIndex(C.boundary, 512, 1e-9);
  return C;
}

std::vector<Carrot> build_carrots(const CutFamily& Z, double rho, const CarrotOptions& opts, int threads) {
  const int n = static_cast<int>(Z.cuts().size());
  std::vector<Carrot> out(n);
  parallel_for(0, n, threads, [&](int i) { out[i] = build_carrot(Z.solver(), Z, i, rho, opts); });
  return out;
}

Polyline side_pair(const Carrot& C) {
  Polyline out;
  for (const auto& p : C.side_r)
    if (std::abs(p - C.root) > 1e-13) out.push_back(p);
  out.push_back(C.root);
  for (auto it = C.side_l.rbegin(); it != C.side_l.rend(); ++it)
    if (std::abs(*it - C.root) > 1e-13) out.push_back(*it);
  return out;
}

double carrot_image_deviation(const Polynomial& P, const Carrot& C, const Carrot& image) {
  const double shift = std::log(static_cast<double>(P.degree()));
  double worst = 0.0;
  auto side = [&](const Polyline& src, const std::vector<double>& lg, const Polyline& dst,
                  const std::vector<double>& dst_lg) {
    for (std::size_t k = 0; k < src.size(); ++k) {
      const double target = lg[k] + shift;
      if (target > dst_lg.front() + 1e-12 || target < dst_lg.back() - 1e-12) continue;
      worst = std::max(worst, distance_to_polyline(P(src[k]), dst));
    }
  };
  side(C.side_r, C.side_r_log_g, image.side_r, image.side_r_log_g);
  side(C.side_l, C.side_l_log_g, image.side_l, image.side_l_log_g);
  return worst;
}

double carrot_separation(const Carrot& a, const Carrot& b) {
  const auto& A = a.boundary;
  const auto& Bp = b.boundary;
  const std::size_t n = A.size(), m = Bp.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex p = A[i], q = A[(i + 1) % n];
    for (std::size_t j = 0; j < m; ++j)
      if (segments_intersect(p, q, Bp[j], Bp[(j + 1) % m])) return -1.0;
  }
  if (crossing_inside(A[n / 2], Bp) || crossing_inside(Bp[m / 2], A)) return -1.0;
  double best = HUGE_VAL;
  for (const auto& p : A) best = std::min(best, distance_to_polygon(p, Bp));
  for (const auto& p : Bp) best = std::min(best, distance_to_polygon(p, A));
  return best;
}

HermiteTable::HermiteTable(std::vector<double> x, std::vector<Complex> y, std::vector<Complex> dy)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
  if (x_.size() < 2 || y_.size() != x_.size() || dy_.size() != x_.size())
    throw Error(ErrorCode::InvalidInput, "Hermite table needs at least two matching nodes");
  for (std::size_t k = 1; k < x_.size(); ++k)
    if (!(x_[k] > x_[k - 1])) throw Error(ErrorCode::InvalidInput, "Hermite nodes must increase");
}

std::size_t HermiteTable::segment(double x) const noexcept {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin());
  return std::clamp<std::size_t>(k, 1, x_.size() - 1) - 1;
}

Complex HermiteTable::value(double x) const noexcept {
  if (x <= x_.front()) return y_.front() + (x - x_.front()) * dy_.front();
  if (x >= x_.back()) return y_.back() + (x - x_.back()) * dy_.back();
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * dy_[k] + (-2 * t3 + 3 * t2) * y_[k + 1] +
         (t3 - t2) * h * dy_[k + 1];
}

Complex HermiteTable::derivative(double x) const noexcept {
  if (x <= x_.front()) return dy_.front();
  if (x >= x_.back()) return dy_.back();
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y_[k] + (-6 * t2 + 6 * t) * y_[k + 1]) / h + (3 * t2 - 4 * t + 1) * dy_[k] +
         (3 * t2 - 2 * t) * dy_[k + 1];
}

CarrotChart::CarrotChart(const Carrot& C) : root_(C.root) {
  const double floor_gap = 1e-11 * std::max(1.0, std::abs(C.root));
  const double log_top = std::log(C.g_top);
  auto side_table = [&](const Polyline& pts, const std::vector<double>& lg, const std::vector<Complex>& tan,
                        Complex start_near) {
    std::vector<double> v;
    std::vector<Complex> y, dy;
    Complex prev = start_near;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Complex w = pts[k] - root_;
      if (std::abs(w) < floor_gap) break;
      prev = log_near(w, prev);
      v.push_back(log_top - lg[k]);
      y.push_back(prev);
      dy.push_back(-tan[k] / w);
    }
    return HermiteTable(std::move(v), std::move(y), std::move(dy));
  };

  side_r_ = side_table(C.side_r, C.side_r_log_g, C.side_r_tangent, std::log(C.side_r.front() - root_));

  const std::size_t na = C.equip_arc.size();
  std::vector<double> s(na);
  std::vector<Complex> y(na), dy(na);
  Complex prev = side_r_.value(0.0);
  for (std::size_t k = 0; k < na; ++k) {
    const Complex w = C.equip_arc[k] - root_;
    prev = log_near(w, prev);
    s[k] = static_cast<double>(k) / static_cast<double>(na - 1);
    y[k] = prev;
    dy[k] = C.arc_dz_dtheta[k] * C.arc_span / w;
  }
  arc_ = HermiteTable(s, y, dy);
  side_l_ = side_table(C.side_l, C.side_l_log_g, C.side_l_tangent, y.back());
  v_max_ = std::min(side_r_.back(), side_l_.back());

  const double v_stop = v_max_ + 12.0;
  for (double v = 0.0; v <= v_stop; v += 0.125)
    for (int i = 0; i <= 16; ++i) {
      const double si = i / 16.0;
      seeds_.push_back({si, v, log_at(si, v)});
    }
}

Complex CarrotChart::blend(double s, double v, Complex side_r, Complex side_l, Complex arc, Complex corner_r,
                           Complex corner_l) noexcept {
  const double t = std::exp(-v);
  return (1.0 - s) * side_r + s * side_l + t * (arc - (1.0 - s) * corner_r - s * corner_l);
}

Complex CarrotChart::log_at(double s, double v) const noexcept {
  return blend(s, v, side_r_.value(v), side_l_.value(v), arc_.value(s), side_r_.value(0.0), side_l_.value(0.0));
}

void CarrotChart::partials(double s, double v, Complex& value, Complex& ds, Complex& dv) const noexcept {
  const double t = std::exp(-v);
  const Complex r = side_r_.value(v), l = side_l_.value(v), e = arc_.value(s);
  const Complex cr = side_r_.value(0.0), cl = side_l_.value(0.0);
  const Complex bracket = e - (1.0 - s) * cr - s * cl;
  value = (1.0 - s) * r + s * l + t * bracket;
  ds = l - r + t * (arc_.derivative(s) + cr - cl);
  dv = (1.0 - s) * side_r_.derivative(v) + s * side_l_.derivative(v) - t * bracket;
}

std::optional<CarrotChart::Coordinates> CarrotChart::invert(Complex z) const {
  constexpr double kOvershoot = 0.02;
  const Complex w = z - root_;
  if (w == 0.0) return std::nullopt;

  // Three nearest seeds, each with its own branch of the logarithm.
  struct Cand {
    double dist;
    std::size_t idx;
    Complex target;
  };
  std::array<Cand, 3> best{Cand{HUGE_VAL, 0, {}}, Cand{HUGE_VAL, 0, {}}, Cand{HUGE_VAL, 0, {}}};
  const Complex L0 = std::log(w);
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    const double k = std::round((seeds_[i].log.imag() - L0.imag()) / kTwoPi);
    const Complex tgt(L0.real(), L0.imag() + kTwoPi * k);
    const double dist = std::abs(tgt - seeds_[i].log);
    if (dist < best[2].dist) {
      best[2] = {dist, i, tgt};
      std::sort(best.begin(), best.end(), [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
    }
  }

  for (const auto& cand : best) {
    if (!std::isfinite(cand.dist)) continue;
    double s = seeds_[cand.idx].s, v = seeds_[cand.idx].v;
    for (int it = 0; it < 60; ++it) {
      Complex val, ds, dv;
      partials(s, v, val, ds, dv);
      const Complex r = val - cand.target;
      if (std::abs(r) < 1e-13 * std::max(1.0, std::abs(cand.target))) {
        // The polygonal boundary deviates slightly from the interpolated sides.
        if (s < -kOvershoot || s > 1.0 + kOvershoot || v < -kOvershoot) break;
        return Coordinates{s, v};
      }
      const double det = ds.real() * dv.imag() - dv.real() * ds.imag();
      if (det == 0.0 || !std::isfinite(det)) break;
      double step_s = (r.real() * dv.imag() - dv.real() * r.imag()) / det;
      double step_v = (ds.real() * r.imag() - r.real() * ds.imag()) / det;
      const double len = std::hypot(step_s, 0.25 * step_v);
      if (len > 0.25) {
        step_s *= 0.25 / len;
        step_v *= 0.25 / len;
      }
      s = std::clamp(s - step_s, -0.1, 1.1);
      v = std::max(v - step_v, -0.1);
    }
  }
  return std::nullopt;
}

double linearization_radius(const Polynomial& P, const Cycle& cycle) {
  if (cycle.points.empty()) throw Error(ErrorCode::InvalidInput, "empty cycle");
  const Complex z0 = cycle.points.front();
  const int p = cycle.period;
  auto ok = [&](double r) {
    for (int j = 0; j < 4; ++j) {
      const double rr = r * std::ldexp(1.0, -j);
      for (int k = 0; k < 64; ++k) {
        const Complex z = z0 + std::polar(rr, kTwoPi * k / 64.0);
        const auto jet = iterate_jet(P, z, p);
        if (!(std::abs(jet.d1) > 1.0) || !(std::abs(jet.value - z0) > rr)) return false;
      }
    }
    return true;
  };
  for (double r = 1.0; r >= 1e-8; r *= 0.5)
    if (ok(r)) return r;
  return 0.0;
}

Complex koenigs_coordinate(const Polynomial& P, const Cycle& cycle, Complex z) {
  if (cycle.points.empty()) throw Error(ErrorCode::InvalidInput, "empty cycle");
  const Complex lambda = cycle.multiplier;
  if (!(std::abs(lambda) > 1.0)) throw Error(ErrorCode::InvalidInput, "Koenigs coordinate needs a repelling cycle");
  const Complex z0 = cycle.points.front();
  const int p = cycle.period;
  const double r_lin = linearization_radius(P, cycle);
  if (!(std::abs(z - z0) <= r_lin))
    throw Error(ErrorCode::OutsideLinearizationDomain,
                "point is " + std::to_string(std::abs(z - z0)) + " from the cycle, radius " + std::to_string(r_lin));

  const auto c = iterate_series(P, z0, p, 3);
  const Complex a2 = c[2] / (lambda - lambda * lambda);
  const Complex a3 = (c[3] + 2.0 * a2 * lambda * c[2]) / (lambda - lambda * lambda * lambda);

  const double stop = 1e-4 * r_lin;
  Complex w = z, scale = 1.0;
  for (int n = 0; n < 400 && std::abs(w - z0) > stop; ++n) {
    const Complex target = w;
    Complex x = z0 + (w - z0) / lambda;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const auto jet = iterate_jet(P, x, p);
      const Complex step = (jet.value - target) / jet.d1;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) {
        converged = true;
        break;
      }
    }
    if (!converged && std::abs(iterate(P, x, p) - target) > 1e-12 * std::max(1.0, std::abs(target)))
      throw Error(ErrorCode::NonConvergence, "inverse branch did not converge");
    w = x;
    scale *= lambda;
  }
  const Complex h = w - z0;
  return scale * (h + a2 * h * h + a3 * h * h * h);
}

}  // namespace renorm
