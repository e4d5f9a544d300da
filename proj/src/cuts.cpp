#include "renorm/cuts.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "renorm/error.hpp"
#include "renorm/parallel.hpp"

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string fmt(Complex z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

std::string pair_str(const Angle& r, const Angle& l) { return "(" + r.str() + "," + l.str() + ")"; }

// First periodic point on the forward orbit of z, with its period and multiplier.
struct EventualCycle {
  bool found = false;
  int preperiod = 0;
  int period = 0;
  Complex point{};
  Complex multiplier{};
};

EventualCycle eventual_cycle(const Polynomial& P, Complex z) {
  EventualCycle out;
  for (int k = 0; k < 16; ++k) {
    for (int p = 1; p <= 24; ++p) {
      Complex w = z;
      Complex deriv = 1.0;
      for (int j = 0; j < p; ++j) {
        deriv *= P.derivative(w);
        w = P.jet(w).value;
      }
      if (std::abs(w - z) < 1e-7 * std::max(1.0, std::abs(z))) {
        out.found = true;
        out.preperiod = k;
        out.period = p;
        out.point = z;
        out.multiplier = deriv;
        return out;
      }
    }
    z = P.jet(z).value;
  }
  return out;
}

}  // namespace

double Cut::arc_length() const noexcept {
  if (degenerate) return 0.0;
  const Angle diff(theta_l.num() * theta_r.den() - theta_r.num() * theta_l.den(),
                   theta_l.den() * theta_r.den());
  return diff.num() == 0 ? 1.0 : diff.turns();
}

Cut build_cut(const BoettcherSolver& B, const Angle& theta_r, const Angle& theta_l,
              const CutOptions& opts) {
  Cut cut;
  cut.theta_r = theta_r;
  cut.theta_l = theta_l;
  cut.degenerate = theta_r == theta_l;
  cut.ray_r = trace_ray(B, theta_r, opts.g_start, opts.g_end, opts.substeps);
  cut.ray_l = cut.degenerate ? cut.ray_r : trace_ray(B, theta_l, opts.g_start, opts.g_end, opts.substeps);
  for (const auto* ray : {&cut.ray_r, &cut.ray_l}) {
    if (!ray->landing || !ray->landing->converged)
      throw Error(ErrorCode::RayNotConverged, "ray " + ray->angle.str() + " has no converged landing");
  }
  const Complex ar = cut.ray_r.landing->point, al = cut.ray_l.landing->point;
  if (std::abs(ar - al) > 1e-5)
    throw Error(ErrorCode::NoColanding, "rays " + pair_str(theta_r, theta_l) + " land at " + fmt(ar) +
                                            " and " + fmt(al));
  cut.root = 0.5 * (ar + al);
  return cut;
}

Cut build_cut(const Polynomial& P, const Angle& theta_r, const Angle& theta_l,
              const CutOptions& opts) {
  return build_cut(BoettcherSolver(P), theta_r, theta_l, opts);
}

Wedge build_wedge(const BoettcherSolver& B, const Cut& cut, double truncation, int arc_samples,
                  int substeps) {
  Wedge w;
  w.theta_r = cut.theta_r;
  w.theta_l = cut.theta_l;
  w.degenerate = cut.degenerate;
  w.truncation = truncation;
  if (cut.degenerate) return w;

  TraceOptions opts;
  opts.substeps = substeps;
  const double log_top = std::log(truncation);
  const double log_end = std::log(std::min(cut.ray_r.potentials.back(), truncation));
  const auto r = trace_curve(B, CurveAngle{cut.theta_r}, log_top, log_end, opts);
  const auto l = trace_curve(B, CurveAngle{cut.theta_l}, log_top, log_end, opts);
  const auto arc = equipotential_arc(B, truncation, cut.theta_r, 0.0, cut.arc_length(), arc_samples);

  w.boundary.push_back(cut.root);
  for (auto it = r.points.rbegin(); it != r.points.rend(); ++it)
    if (std::abs(*it - cut.root) > 1e-12) w.boundary.push_back(*it);
  for (std::size_t k = 1; k + 1 < arc.points.size(); ++k) w.boundary.push_back(arc.points[k]);
  for (const auto& p : l.points)
    if (std::abs(p - cut.root) > 1e-12) w.boundary.push_back(p);
  w.index = PolygonIndex(w.boundary, 512, 1e-9);
  return w;
}

bool wedge_contains(const Wedge& W, Complex z) noexcept { return W.contains(z); }

const char* to_string(RootClass c) noexcept {
  switch (c) {
    case RootClass::OutwardRepelling: return "outward-repelling";
    case RootClass::OutwardParabolic: return "outward-parabolic";
    case RootClass::Unresolved: return "unresolved";
  }
  return "unknown";
}

bool CutFamily::in_any_wedge(Complex z) const noexcept {
  for (const auto& w : wedges_)
    if (w.contains(z)) return true;
  return false;
}

std::vector<int> CutFamily::orbit(int i) const {
  std::vector<int> out;
  std::vector<bool> seen(cuts_.size(), false);
  while (i >= 0 && !seen[i]) {
    seen[i] = true;
    out.push_back(i);
    i = forward_[i];
  }
  return out;
}

CutFamily CutFamily::build(const Polynomial& P, const std::vector<CutSpec>& specs, double truncation,
                           const CutOptions& opts, int threads) {
  if (!(truncation > 0.0)) throw Error(ErrorCode::InvalidInput, "truncation potential must be positive");
  CutFamily Z;
  Z.solver_ = std::make_shared<BoettcherSolver>(P);
  Z.truncation_ = truncation;
  const int n = static_cast<int>(specs.size());
  Z.cuts_.resize(n);
  Z.wedges_.resize(n);
  parallel_for(0, n, threads, [&](int i) {
    Z.cuts_[i] = build_cut(*Z.solver_, specs[i].theta_r, specs[i].theta_l, opts);
    Z.wedges_[i] = build_wedge(*Z.solver_, Z.cuts_[i], truncation, 256, opts.substeps);
  });

  const int d = P.degree();
  Z.forward_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const Angle ir = Z.cuts_[i].theta_r.times(d), il = Z.cuts_[i].theta_l.times(d);
    for (int j = 0; j < n; ++j)
      if (Z.cuts_[j].theta_r == ir && Z.cuts_[j].theta_l == il) Z.forward_[i] = j;
  }

  const auto crit = critical_points(P);
  Z.flags_.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& f = Z.flags_[i];
    const auto orb = Z.orbit(i);
    const int last = orb.back();
    f.periodic = Z.forward_[last] == i;
    f.preperiodic = !f.periodic && Z.forward_[last] >= 0;
    for (const auto& c : crit)
      if (std::abs(c - Z.cuts_[i].root) < 1e-6) f.critical_root = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!Z.cuts_[i].degenerate) continue;
    bool reached = false;
    for (int j = 0; j < n && !reached; ++j) {
      if (Z.cuts_[j].degenerate) continue;
      for (int k : Z.orbit(j))
        if (k == i) reached = true;
    }
    Z.flags_[i].fictitious = !reached;
  }
  Z.classes_.resize(n);
  for (int i = 0; i < n; ++i) Z.classes_[i] = classify_root(P, Z, Z.cuts_[i]);
  return Z;
}

RootClassification classify_root(const Polynomial& P, const CutFamily& Z, const Cut& cut) {
  RootClassification out;
  const auto cyc = eventual_cycle(P, cut.root);
  if (!cyc.found) {
    out.detail = "no periodic point found on the root orbit";
    return out;
  }
  out.terminal_point = cyc.point;
  out.terminal_period = cyc.period;
  out.multiplier = cyc.multiplier;
  const auto kind = classify_multiplier(cyc.multiplier);
  if (kind == CycleKind::Repelling) {
    out.kind = RootClass::OutwardRepelling;
    out.detail = "terminal cycle repelling, |lambda|=" + fmt(std::abs(cyc.multiplier));
    return out;
  }
  if (kind != CycleKind::Parabolic) {
    out.detail = std::string("terminal cycle ") + to_string(kind);
    return out;
  }
  // Parabolic: lambda^q = 1; attracting directions of P^{period q} at the point.
  int q = 1;
  const double turns = std::arg(cyc.multiplier) / kTwoPi;
  for (; q <= 64; ++q)
    if (std::abs(turns * q - std::round(turns * q)) < 1e-6) break;
  const int N = cyc.period * q;
  const auto series = iterate_series(P, cyc.point, N, 12);
  int k = 2;
  while (k < static_cast<int>(series.size()) && std::abs(series[k]) < 1e-9) ++k;
  if (k >= static_cast<int>(series.size())) {
    out.detail = "degenerate parabolic expansion";
    return out;
  }
  const int nu = k - 1;
  const double base_arg = std::numbers::pi - std::arg(series[k]);
  int inside = 0, ambiguous = 0;
  // Directions are taken at the terminal point; for a preperiodic root they are
  // pulled back through the local inverse of P^preperiod.
  for (int j = 0; j < nu; ++j) {
    const Complex dir = std::polar(1.0, (base_arg + kTwoPi * j) / nu);
    Complex sample = cyc.point + 1e-4 * dir;
    if (cyc.preperiod > 0) {
      Complex z = cut.root + 1e-4 * dir;
      for (int it = 0; it < 60; ++it) {
        const auto jet = iterate_jet(P, z, cyc.preperiod);
        const Complex step = (jet.value - sample) / jet.d1;
        z -= step;
        if (std::abs(step) < 1e-15) break;
      }
      sample = z;
    }
    bool near_boundary = false;
    for (const auto& w : Z.wedges())
      if (!w.degenerate && distance_to_polygon(sample, w.boundary) < 1e-9) near_boundary = true;
    if (near_boundary)
      ++ambiguous;
    else if (Z.in_any_wedge(sample))
      ++inside;
  }
  if (inside > 0) {
    out.kind = RootClass::OutwardParabolic;
    out.detail = std::to_string(inside) + " of " + std::to_string(nu) + " attracting directions in wedges";
  } else {
    out.detail = ambiguous ? "attracting direction on a wedge boundary"
                           : "no attracting direction points into a wedge";
  }
  return out;
}

AdmissibilityReport check_admissible(const Polynomial& P, const CutFamily& Z, double G0) {
  AdmissibilityReport rep;
  const auto& cuts = Z.cuts();
  const int n = static_cast<int>(cuts.size());
  if (n == 0) {
    rep.rows.push_back({"empty-family", -1, -1, "no cuts: avoiding set equals K_P", true});
    return rep;
  }
  const int d = P.degree();
  for (int i = 0; i < n; ++i) {
    const bool ok = Z.forward_map()[i] >= 0;
    const std::string image = pair_str(cuts[i].theta_r.times(d), cuts[i].theta_l.times(d));
    rep.rows.push_back({"forward-invariance", i, Z.forward_map()[i],
                        pair_str(cuts[i].theta_r, cuts[i].theta_l) + " -> " + image +
                            (ok ? " present" : " missing"),
                        ok});
    if (!ok) rep.invariant = false;
  }
  for (int j = 0; j < n; ++j) {
    if (cuts[j].degenerate) continue;
    const auto& wedge = Z.wedges()[j];
    const double from = cuts[j].theta_r.turns(), to = cuts[j].theta_l.turns();
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      std::string why;
      for (const auto& a : {cuts[i].theta_r, cuts[i].theta_l})
        if (in_open_arc(a.turns(), from, to)) why = "angle " + a.str() + " inside arc";
      if (why.empty() && wedge.contains(cuts[i].root)) why = "root " + fmt(cuts[i].root) + " inside wedge";
      if (why.empty()) {
        for (const auto* ray : {&cuts[i].ray_r, &cuts[i].ray_l})
          for (std::size_t k = 0; k < ray->points.size() && why.empty(); ++k)
            if (ray->potentials[k] <= G0 && wedge.contains(ray->points[k]))
              why = "ray sample at G=" + fmt(ray->potentials[k]) + " inside wedge";
      }
      const bool ok = why.empty();
      rep.rows.push_back({"principal-component", i, j,
                          pair_str(cuts[i].theta_r, cuts[i].theta_l) + " vs wedge " +
                              pair_str(cuts[j].theta_r, cuts[j].theta_l) + (ok ? ": clear" : ": " + why),
                          ok});
      if (!ok) rep.offending.emplace_back(i, j);
    }
  }
  rep.admissible = rep.invariant && rep.offending.empty();
  return rep;
}

LegalityReport check_legal([[maybe_unused]] const Polynomial& P, const CutFamily& Z) {
  LegalityReport rep;
  const auto& cuts = Z.cuts();
  const auto& fwd = Z.forward_map();
  const int n = static_cast<int>(cuts.size());
  auto label = [&](int i) { return pair_str(cuts[i].theta_r, cuts[i].theta_l); };

  for (int i = 0; i < n; ++i) {
    const auto& fl = Z.flags()[i];
    if (fl.periodic && !cuts[i].degenerate) rep.periodic_nondegenerate.push_back(i);
    if (fl.fictitious) rep.fictitious.push_back(i);
    rep.rows.push_back({"critical-root", i, -1,
                        label(i) + " root " + fmt(cuts[i].root) + (fl.critical_root ? " critical" : " not critical"),
                        true});

    const auto orb = Z.orbit(i);
    if (fwd[orb.back()] < 0) {
      rep.rows.push_back({"closure", i, -1, label(i) + ": forward orbit leaves the family", false});
      continue;
    }
    // Terminal cycle of cuts and its root multiplier.
    const int entry = fwd[orb.back()];
    bool cycle_degenerate = true;
    for (int k = entry;;) {
      cycle_degenerate = cycle_degenerate && cuts[k].degenerate;
      k = fwd[k];
      if (k == entry) break;
    }
    const auto& cls = Z.classification()[entry];
    const bool repelling = classify_multiplier(cls.multiplier) == CycleKind::Repelling;
    rep.rows.push_back({"terminal-cycle", i, entry,
                        label(i) + " -> periodic cut " + label(entry) + " root " + fmt(cuts[entry].root) +
                            (cycle_degenerate ? " degenerate" : " nondegenerate") + ", multiplier " +
                            fmt(cls.multiplier) + (repelling ? " repelling" : " not repelling"),
                        cycle_degenerate && repelling});

    if (!cuts[i].degenerate) {
      int pred = -1, hit = -1;
      for (std::size_t k = 0; k + 1 < orb.size() + 1; ++k) {
        const int cur = orb[k];
        const int next = fwd[cur];
        if (next >= 0 && cuts[next].degenerate) {
          pred = cur;
          hit = next;
          break;
        }
      }
      const bool ok = pred >= 0 && Z.flags()[pred].critical_root;
      std::string detail = label(i);
      if (pred < 0)
        detail += ": never reaches a degenerate cut";
      else
        detail += ": last nondegenerate cut " + label(pred) + " root " + fmt(cuts[pred].root) +
                  (Z.flags()[pred].critical_root ? " is critical" : " is not critical") +
                  ", maps to degenerate cut " + label(hit) + " rooted at " + fmt(cuts[hit].root);
      rep.rows.push_back({"precritical", i, hit, detail, ok});
    }
  }
  for (int i : rep.periodic_nondegenerate)
    rep.rows.push_back({"periodic-nondegenerate", i, -1, label(i) + " is periodic and nondegenerate", false});
  for (int i : rep.fictitious)
    rep.rows.push_back({"fictitious", i, -1, label(i) + " has no nondegenerate preimage in the family", false});
  for (const auto& row : rep.rows) rep.legal = rep.legal && row.pass;
  return rep;
}

std::string rows_to_csv(const std::vector<CheckRow>& rows) {
  std::ostringstream os;
  os << "check,cut,other,pass,detail\n";
  for (const auto& r : rows) {
    std::string detail = r.detail;
    for (auto& c : detail)
      if (c == ',') c = ';';
    os << r.check << ',' << r.cut << ',' << r.other << ',' << (r.pass ? "PASS" : "FAIL") << ',' << detail
       << '\n';
  }
  return os.str();
}

}  // namespace renorm
