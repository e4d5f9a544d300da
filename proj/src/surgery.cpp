#include "renorm/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "renorm/error.hpp"
#include "renorm/parallel.hpp"

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) noexcept { return x - std::floor(x); }

Complex log_near(Complex w, Complex near) noexcept {
  const Complex l = std::log(w);
  const double k = std::round((near.imag() - l.imag()) / kTwoPi);
  return {l.real(), l.imag() + kTwoPi * k};
}

bool is_critical_cut(const CutFamily& Z, int i) {
  return Z.flags()[i].critical_root && !Z.cuts()[i].degenerate;
}

}  // namespace

int degree_formula(const CutFamily& Z) {
  const int d = Z.poly().degree();
  int lost = 0;
  for (int i = 0; i < static_cast<int>(Z.cuts().size()); ++i) {
    if (!is_critical_cut(Z, i)) continue;
    const double k = d * Z.cuts()[i].arc_length();
    if (std::abs(k - std::round(k)) > 1e-9)
      throw Error(ErrorCode::InvalidInput, "d |I| is not an integer for a critical cut");
    lost += static_cast<int>(std::lround(k));
  }
  const int dc = d - lost;
  if (dc < 2)
    throw Error(ErrorCode::InvalidInput,
                "topological degree " + std::to_string(dc) + " < 2: P is injective on the avoiding set");
  return dc;
}

CarrotPatch::CarrotPatch(const Polynomial& P, const Carrot& source, const Carrot& image)
    : source_(std::make_shared<const Carrot>(source)),
      image_(std::make_shared<const Carrot>(image)),
      src_(*source_),
      img_(*image_) {
  root_taylor_ = P.taylor_at(source.root);
  offset_ = root_taylor_[0] - image.root;
  root_taylor_[0] = 0.0;
  corner_r_ = side_image(0.0, false);
  corner_l_ = side_image(0.0, true);
}

Complex CarrotPatch::side_image(double v, bool left) const noexcept {
  const Complex h = std::exp(left ? src_.log_side_l(v) : src_.log_side_r(v));
  Complex acc = 0.0;
  for (std::size_t k = root_taylor_.size(); k-- > 1;) acc = (acc + root_taylor_[k]) * h;
  acc += offset_;
  return log_near(acc, left ? img_.log_side_l(v) : img_.log_side_r(v));
}

Complex CarrotPatch::map_coords(double s, double v) const noexcept {
  const Complex L = CarrotChart::blend(s, v, side_image(v, false), side_image(v, true), img_.log_arc(s),
                                       corner_r_, corner_l_);
  return img_.root() + std::exp(L);
}

Complex CarrotPatch::map(Complex z) const {
  if (z == src_.root()) return img_.root();
  const auto c = src_.invert(z);
  if (!c) throw Error(ErrorCode::NonConvergence, "carrot chart inversion failed");
  return map_coords(c->s, c->v);
}

SurgeryMap SurgeryMap::build(const CutFamily& Z, double rho, const SurgeryOptions& opts) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidInput, "rho must lie in (0,1)");
  SurgeryMap S;
  S.Z_ = std::make_shared<const CutFamily>(Z);
  const Polynomial& P = Z.poly();
  const int d = P.degree();
  S.rho_ = rho;
  S.G0_ = -std::log(rho);
  S.G1_ = d * S.G0_;
  S.d_c_ = degree_formula(Z);

  S.carrots_ = build_carrots(Z, rho, opts.carrot, opts.threads);
  const int n = static_cast<int>(S.carrots_.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (carrot_separation(S.carrots_[i], S.carrots_[j]) <= 0.0)
        throw Error(ErrorCode::CarrotOverlap, "carrots of cuts " + std::to_string(i) + " and " +
                                                  std::to_string(j) + " intersect");

  const double rho_img = std::pow(rho, d);
  for (int i = 0; i < n; ++i) {
    if (!is_critical_cut(Z, i)) continue;
    const int j = Z.forward_map()[i];
    if (j < 0) throw Error(ErrorCode::InvalidInput, "image cut of a critical cut is missing");
    const Carrot image = build_carrot(Z.solver(), Z, j, rho_img, opts.carrot);
    const double dev = carrot_image_deviation(P, S.carrots_[i], image);
    if (dev > 1e-5)
      throw Error(ErrorCode::WrongPullback,
                  "P moves carrot sides " + std::to_string(dev) + " away from the image carrot");
    S.patches_.emplace_back(P, S.carrots_[i], image);
    const auto& src = S.patches_.back().source();
    S.arcs_.push_back({src.arc_start, src.arc_span, image.arc_start, image.arc_span,
                       static_cast<int>(S.patches_.size()) - 1});
  }

  double loss = 0.0;
  for (const auto& a : S.arcs_) loss += d * a.span - a.image_span;
  if (std::abs(d - loss - S.d_c_) > 1e-9)
    throw Error(ErrorCode::DegreeMismatch, "arc correspondences do not add up to the degree formula");

  // A base angle outside every critical arc.
  bool found = false;
  for (int k = 0; k < 4096 && !found; ++k) {
    const double cand = (k + 0.5) / 4096.0;
    bool inside = false;
    for (const auto& a : S.arcs_)
      if (frac(cand - a.start) <= a.span + 1e-9) inside = true;
    if (!inside) {
      S.base_ = cand;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::CarrotOverlap, "critical arcs cover the whole equipotential");
  std::sort(S.arcs_.begin(), S.arcs_.end(),
            [&](const CritArc& a, const CritArc& b) { return frac(a.start - S.base_) < frac(b.start - S.base_); });

  // Continuity across patch boundaries.
  double gap = 0.0;
  for (const auto& patch : S.patches_) {
    const Carrot& C = patch.source();
    for (const auto* side : {&C.side_r, &C.side_l})
      for (const auto& z : *side) gap = std::max(gap, std::abs(patch.map(z) - P(z)));
    const auto& img_arc = patch.image().equip_arc;
    for (std::size_t k = 0; k < C.equip_arc.size() && k < img_arc.size(); ++k)
      gap = std::max(gap, std::abs(patch.map(C.equip_arc[k]) - img_arc[k]));
  }
  const int m = std::max(1, opts.continuity_samples);
  std::vector<double> cap_gap(m, 0.0);
  parallel_for(0, m, opts.threads, [&](int k) {
    const double theta = (k + 0.5) / m;
    double s = 0.0;
    const int p = S.arc_at(theta, s);
    const Complex expected = p >= 0 ? S.patches_[p].map_coords(s, 0.0) : P(S.basin_point(S.G0_, theta));
    const Complex cap = S.basin_point(S.cap_potential(S.G0_), S.cap_angle(S.G0_, theta));
    cap_gap[k] = std::abs(cap - expected);
  });
  for (double g : cap_gap) gap = std::max(gap, g);
  S.continuity_gap_ = gap;
  if (gap > opts.continuity_tol)
    throw Error(ErrorCode::ContinuityGap, "patch mismatch " + std::to_string(gap));
  return S;
}

int SurgeryMap::patch_at(Complex z) const noexcept {
  for (std::size_t p = 0; p < patches_.size(); ++p)
    if (patches_[p].source().contains(z)) return static_cast<int>(p);
  return -1;
}

int SurgeryMap::arc_at(double theta, double& s) const noexcept {
  for (const auto& a : arcs_) {
    const double o = frac(theta - a.start);
    if (o <= a.span) {
      s = o / a.span;
      return a.patch;
    }
  }
  return -1;
}

double SurgeryMap::boundary_angle(double theta) const noexcept {
  const int d = this->d();
  const double x = theta - base_;
  const double turns = std::floor(x);
  const double r = x - turns;
  double h = d * r;
  for (const auto& a : arcs_) {
    const double o = frac(a.start - base_);
    if (r >= o + a.span) {
      h -= d * a.span - a.image_span;
    } else if (r > o) {
      h -= (d - a.image_span / a.span) * (r - o);
      break;
    } else {
      break;
    }
  }
  return d * base_ + d_c_ * turns + h;
}

double SurgeryMap::cap_potential(double G) const noexcept {
  const int d = this->d();
  if (G >= G1_) return d_c_ * G;
  return d * G0_ + (G - G0_) * d * (d_c_ - 1.0) / (d - 1.0);
}

double SurgeryMap::cap_angle(double G, double theta) const noexcept {
  if (G >= G1_) return d_c_ * theta;
  const double s = std::clamp((G - G0_) / (G1_ - G0_), 0.0, 1.0);
  return (1.0 - s) * boundary_angle(theta) + s * d_c_ * theta;
}

Complex SurgeryMap::basin_point(double G, double theta) const {
  if (!(G > 0.0)) throw Error(ErrorCode::InvalidInput, "basin point needs G > 0");
  if (G > 600.0) return {HUGE_VAL, 0.0};
  const double th = frac(theta);
  const auto& B = Z_->solver();
  TraceOptions opts;
  opts.substeps = 4;
  return trace_curve(B, CurveAngle{Angle(0, 1), th}, std::log(G), std::log(G), opts).points.back();
}

Complex SurgeryMap::operator()(Complex z) const {
  const Polynomial& P = poly();
  const double G = green_potential(P, z);
  if (G >= G0_) {
    const auto L = Z_->solver().log_boettcher(z);
    if (!L) throw Error(ErrorCode::NonConvergence, "Boettcher coordinate of a basin point failed");
    const double g = L->real();
    const double theta = L->imag() / kTwoPi;
    return basin_point(cap_potential(g), cap_angle(g, theta));
  }
  const int p = patch_at(z);
  return p >= 0 ? patches_[p].map(z) : P(z);
}

DegreeReport degree_dc(const SurgeryMap& S, int points, int samples) {
  if (points < 1 || samples < 256) throw Error(ErrorCode::InvalidInput, "need points >= 1 and samples >= 256");
  const Polynomial& P = S.poly();
  const auto& B = S.family().solver();
  const auto E = equipotential_arc(B, S.G0(), Angle(0, 1), 0.0, 1.0, samples);
  std::vector<Complex> img(samples);
  std::vector<double> ang(samples);
  parallel_for(0, samples, 0, [&](int k) {
    double s = 0.0;
    const int p = S.arc_at(static_cast<double>(k) / samples, s);
    img[k] = p >= 0 ? S.patches()[p].map(E.points[k]) : P(E.points[k]);
    const auto L = B.log_boettcher(img[k]);
    if (!L) throw Error(ErrorCode::NonConvergence, "Boettcher angle of an image sample failed");
    ang[k] = L->imag() / kTwoPi;
  });

  DegreeReport rep;
  rep.formula = S.d_c();

  std::vector<Complex> probes = critical_points(P);
  for (const auto& c : S.family().cuts()) probes.push_back(c.root);
  for (const auto& w : probes) {
    double total = 0.0;
    for (int k = 0; k < samples; ++k) total += std::arg((img[(k + 1) % samples] - w) / (img[k] - w));
    rep.winding.push_back(static_cast<int>(std::lround(total / kTwoPi)));
  }

  // Unwrapped image angle along E(rho).
  std::vector<double> u(samples + 1);
  u[0] = ang[0];
  for (int k = 1; k <= samples; ++k) {
    double step = ang[k % samples] - ang[k - 1];
    step -= std::round(step);
    u[k] = u[k - 1] + step;
  }
  for (int j = 0; j < points; ++j) {
    const double phi = (j + 0.5) / points + 0.0123;
    long count = 0;
    for (int k = 0; k < samples; ++k)
      count += std::labs(static_cast<long>(std::floor(u[k + 1] - phi) - std::floor(u[k] - phi)));
    rep.preimage_counts.push_back(static_cast<int>(count));
  }

  rep.consistent = true;
  for (int w : rep.winding) rep.consistent = rep.consistent && w == rep.formula;
  for (int c : rep.preimage_counts) rep.consistent = rep.consistent && c == rep.formula;
  if (!rep.consistent)
    throw Error(ErrorCode::DegreeMismatch, "winding and preimage counts disagree with d_c = " +
                                               std::to_string(rep.formula));
  return rep;
}

std::pair<int, int> visit_counts(const SurgeryMap& S, Complex z, int max_iter) {
  const Polynomial& P = S.poly();
  const double d = P.degree();
  double G = green_potential(P, z);
  int cr = 0, all = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (G >= S.G0()) {
      // The cap raises the potential past G1 in one step; no later visits.
      if (G < S.G1()) ++all;
      break;
    }
    const int p = S.patch_at(z);
    if (p >= 0) {
      ++cr;
      ++all;
      z = S.patches()[p].map(z);
      G = green_potential(P, z);
    } else {
      z = P(z);
      G *= d;
    }
  }
  return {cr, all};
}

VisitReport visit_count_experiment(const SurgeryMap& S, const GridSpec& window, int n_seeds, int max_iter,
                                   std::uint64_t seed, int threads) {
  window.validate();
  if (n_seeds < 1 || max_iter < 1) throw Error(ErrorCode::InvalidInput, "need n_seeds >= 1 and max_iter >= 1");
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Complex> seeds(n_seeds);
  for (auto& z : seeds) {
    const double x = window.center.real() + (unit() - 0.5) * window.width;
    const double y = window.center.imag() + (unit() - 0.5) * window.width;
    z = {x, y};
  }
  std::vector<std::pair<int, int>> counts(n_seeds);
  parallel_for(0, n_seeds, threads, [&](int i) { counts[i] = visit_counts(S, seeds[i], max_iter); }, 16);

  VisitReport rep;
  rep.seed = seed;
  rep.n_seeds = n_seeds;
  rep.max_iter = max_iter;
  for (int i = 0; i < n_seeds; ++i) {
    rep.max_cr_visits = std::max(rep.max_cr_visits, counts[i].first);
    rep.max_visits = std::max(rep.max_visits, counts[i].second);
    if (counts[i].first > S.T_cr()) rep.offending.push_back(seeds[i]);
  }
  return rep;
}

Mask nonescaping_mask(const SurgeryMap& S, const GridSpec& grid, const MaskOptions& opts) {
  const Polynomial& P = S.poly();
  const double r2 = P.escape_radius() * P.escape_radius();
  // Beyond E(rho) the cap and P both push the potential up, so iterating P there
  // decides boundedness the same way as f.
  auto bounded = [&](Complex z) {
    for (int k = 0; k < opts.max_iter; ++k) {
      const int p = S.patch_at(z);
      z = p >= 0 ? S.patches()[p].map(z) : P(z);
      if (std::norm(z) > r2) return false;
    }
    return true;
  };
  return rasterize(grid, bounded, opts.threads, opts.supersample);
}

DilatationReport dilatation(const SurgeryMap& S, int grid) {
  if (grid < 2) throw Error(ErrorCode::InvalidInput, "dilatation grid must be >= 2");
  DilatationReport rep;
  const double h = 1e-6;
  for (const auto& patch : S.patches()) {
    const auto& X = patch.source_chart();
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double s = (i + 0.5) / grid, t = (j + 0.5) / grid, v = -std::log(t);
        const Complex xs = (X.point(s + h, v) - X.point(s - h, v)) / (2 * h);
        const Complex xv = (X.point(s, v + h) - X.point(s, v - h)) / (2 * h);
        const Complex ys = (patch.map_coords(s + h, v) - patch.map_coords(s - h, v)) / (2 * h);
        const Complex yv = (patch.map_coords(s, v + h) - patch.map_coords(s, v - h)) / (2 * h);
        // A = J_Y J_X^{-1} as a real 2x2 matrix.
        const double det_x = xs.real() * xv.imag() - xv.real() * xs.imag();
        const double i00 = xv.imag() / det_x, i01 = -xv.real() / det_x;
        const double i10 = -xs.imag() / det_x, i11 = xs.real() / det_x;
        const double a = ys.real() * i00 + yv.real() * i10, b = ys.real() * i01 + yv.real() * i11;
        const double c = ys.imag() * i00 + yv.imag() * i10, e = ys.imag() * i01 + yv.imag() * i11;
        const double q = std::hypot(0.5 * (a + e), 0.5 * (c - b));
        const double r = std::hypot(0.5 * (a - e), 0.5 * (c + b));
        const double ratio = std::abs(q - r) > 0.0 ? (q + r) / std::abs(q - r) : HUGE_VAL;
        ++rep.samples;
        if (q < r) ++rep.reversing;
        if (ratio > 100.0) ++rep.flagged;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
      }
  }
  return rep;
}

}  // namespace renorm
