#include "renorm/verify.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "renorm/error.hpp"
#include "renorm/surgery.hpp"

namespace renorm {

namespace {

constexpr double kAmbiguity = 1e-6;
constexpr double kMultiplierTol = 1e-6;

std::string fmt(Complex z) {
  std::ostringstream os;
  os << std::setprecision(12) << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << 'i';
  return os.str();
}

void put_complex(std::ostringstream& os, Complex z) { os << z.real() << ',' << z.imag(); }

}  // namespace

double distance_to_cuts(const CutFamily& Z, Complex z) {
  double best = HUGE_VAL;
  for (const auto& c : Z.cuts()) {
    if (c.degenerate) continue;
    best = std::min(best, std::abs(z - c.root));
    for (const auto* ray : {&c.ray_r, &c.ray_l}) {
      Polyline line = ray->points;
      line.push_back(c.root);
      best = std::min(best, distance_to_polyline(z, line));
    }
  }
  return best;
}

RegionCycles cycles_in_region(const Polynomial& P, const CutFamily& Z, int max_period) {
  RegionCycles out;
  for (auto& cycle : find_cycles(P, max_period).cycles) {
    bool ambiguous = false, wedge = false;
    for (const auto& z : cycle.points) {
      if (distance_to_cuts(Z, z) < kAmbiguity)
        ambiguous = true;
      else if (Z.in_any_wedge(z))
        wedge = true;
    }
    if (ambiguous)
      out.ambiguous.push_back(std::move(cycle));
    else if (wedge)
      out.excluded.push_back(std::move(cycle));
    else
      out.inside.push_back(std::move(cycle));
  }
  return out;
}

ConjugacyReport conjugacy_report(const Polynomial& P, const CutFamily& Z, const Polynomial& Q, int max_period) {
  if (Z.poly().coeffs() != P.coeffs()) throw Error(ErrorCode::InvalidInput, "cut family belongs to another polynomial");
  if (max_period < 1) throw Error(ErrorCode::InvalidInput, "max_period must be >= 1");
  ConjugacyReport r;
  r.d_c = degree_formula(Z);
  r.max_period = max_period;
  if (Q.degree() != r.d_c)
    throw Error(ErrorCode::DegreeMismatch, "deg Q = " + std::to_string(Q.degree()) + " but d_c = " +
                                               std::to_string(r.d_c));

  const auto region = cycles_in_region(P, Z, max_period);
  const auto q_cycles = find_cycles(Q, max_period).cycles;
  r.ambiguous = !region.ambiguous.empty();

  r.counts_match = true;
  for (int n = 1; n <= max_period; ++n) {
    PeriodCensus row;
    row.period = n;
    for (const auto& c : q_cycles) row.q_cycles += c.period == n;
    for (const auto& c : region.inside) row.p_cycles += c.period == n;
    for (const auto& c : region.ambiguous) row.p_ambiguous += c.period == n;
    row.match = row.q_cycles >= row.p_cycles && row.q_cycles <= row.p_cycles + row.p_ambiguous;
    r.counts_match = r.counts_match && row.match;
    r.census.push_back(row);
  }

  std::vector<bool> used(q_cycles.size(), false);
  for (const auto& c : region.inside) {
    if (c.kind == CycleKind::Repelling) continue;
    MultiplierMatch m;
    m.period = c.period;
    m.has_p = true;
    m.p_point = c.points.front();
    m.p_multiplier = c.multiplier;
    for (std::size_t k = 0; k < q_cycles.size(); ++k) {
      const auto& q = q_cycles[k];
      if (used[k] || q.period != c.period || q.kind == CycleKind::Repelling) continue;
      if (std::abs(q.multiplier - c.multiplier) > kMultiplierTol) continue;
      used[k] = true;
      m.has_q = true;
      m.q_point = q.points.front();
      m.q_multiplier = q.multiplier;
      break;
    }
    r.non_repelling.push_back(m);
  }
  for (std::size_t k = 0; k < q_cycles.size(); ++k) {
    const auto& q = q_cycles[k];
    if (used[k] || q.kind == CycleKind::Repelling) continue;
    MultiplierMatch m;
    m.period = q.period;
    m.has_q = true;
    m.q_point = q.points.front();
    m.q_multiplier = q.multiplier;
    r.non_repelling.push_back(m);
  }
  r.multipliers_match = true;
  for (const auto& m : r.non_repelling) r.multipliers_match = r.multipliers_match && m.matched();
  r.pass = r.counts_match && r.multipliers_match;
  return r;
}

std::string census_csv(const ConjugacyReport& r) {
  std::ostringstream os;
  os << "period,q_cycles,p_cycles,p_ambiguous,match\n";
  for (const auto& row : r.census)
    os << row.period << ',' << row.q_cycles << ',' << row.p_cycles << ',' << row.p_ambiguous << ','
       << (row.match ? 1 : 0) << '\n';
  return os.str();
}

std::string multipliers_csv(const ConjugacyReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "period,p_re,p_im,p_lambda_re,p_lambda_im,q_re,q_im,q_lambda_re,q_lambda_im,matched\n";
  for (const auto& m : r.non_repelling) {
    os << m.period << ',';
    if (m.has_p) {
      put_complex(os, m.p_point);
      os << ',';
      put_complex(os, m.p_multiplier);
    } else {
      os << ",,,";
    }
    os << ',';
    if (m.has_q) {
      put_complex(os, m.q_point);
      os << ',';
      put_complex(os, m.q_multiplier);
    } else {
      os << ",,,";
    }
    os << ',' << (m.matched() ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string report_text(const ConjugacyReport& r) {
  std::ostringstream os;
  os << "topological degree d_c = " << r.d_c << "\n";
  for (const auto& row : r.census) {
    os << "period " << row.period << ": Q has " << row.q_cycles << " cycle(s), P on the avoiding set has "
       << row.p_cycles;
    if (row.p_ambiguous) os << " (+" << row.p_ambiguous << " ambiguous)";
    os << (row.match ? "  ok" : "  MISMATCH") << "\n";
  }
  for (const auto& m : r.non_repelling) {
    os << "non-repelling period " << m.period << ": ";
    if (m.has_p) os << "P at " << fmt(m.p_point) << " multiplier " << fmt(m.p_multiplier);
    if (m.matched()) os << " <-> ";
    if (m.has_q) os << "Q at " << fmt(m.q_point) << " multiplier " << fmt(m.q_multiplier);
    os << (m.matched() ? "  ok" : "  UNMATCHED") << "\n";
  }
  os << "verdict: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace renorm
