#include "renorm/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "renorm/error.hpp"

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct HornerJet {
  Complex f, f1, f2;
};

HornerJet horner_jet(std::span<const Complex> c, Complex z) {
  Complex f = c.back(), f1 = 0.0, f2 = 0.0;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    f2 = f2 * z + 2.0 * f1;
    f1 = f1 * z + f;
    f = f * z + c[k];
  }
  return {f, f1, f2};
}

// Newton step that stays quadratic at multiple roots: z - f f' / (f'^2 - f f'').
Complex modified_newton_step(Complex f, Complex f1, Complex f2) {
  const Complex den = f1 * f1 - f * f2;
  if (std::abs(den) == 0.0) return f1 != 0.0 ? f / f1 : 0.0;
  return f * f1 / den;
}

template <class JetFn>
Complex polish(Complex z, JetFn&& jet, int iterations = 60) {
  Complex best = z;
  double best_res = std::abs(jet(z).f);
  for (int it = 0; it < iterations; ++it) {
    const auto j = jet(z);
    if (j.f == 0.0) return z;
    const Complex step = modified_newton_step(j.f, j.f1, j.f2);
    const Complex next = z - step;
    if (!finite(next)) break;
    z = next;
    const double res = std::abs(jet(z).f);
    if (res < best_res) {
      best_res = res;
      best = z;
    }
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return best;
}

}  // namespace

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 3) throw Error(ErrorCode::InvalidInput, "polynomial degree must be at least 2");
  for (const auto& c : coeffs_)
    if (!finite(c)) throw Error(ErrorCode::InvalidInput, "non-finite coefficient");
  if (coeffs_.back() != Complex(1.0, 0.0))
    throw Error(ErrorCode::InvalidInput, "polynomial must be monic (leading coefficient [1,0])");
  degree_ = static_cast<int>(coeffs_.size()) - 1;
  double sum = 0.0;
  for (int k = 0; k < degree_; ++k) sum += std::abs(coeffs_[k]);
  escape_radius_ = std::max(2.0, 1.0 + sum);

  const auto dc = derivative_coeffs();
  auto crit = polynomial_roots(dc);
  for (std::size_t i = 0; i < crit.size(); ++i) {
    double gap = 1.0;
    for (std::size_t j = 0; j < crit.size(); ++j)
      if (j != i && std::abs(crit[j] - crit[i]) > 1e-6) gap = std::min(gap, 0.5 * std::abs(crit[j] - crit[i]));
    local_.push_back({crit[i], 0.5 * gap, taylor_at(crit[i])});
  }
}

Complex Polynomial::operator()(Complex z) const noexcept {
  Complex f = coeffs_.back();
  for (std::size_t k = coeffs_.size() - 1; k-- > 0;) f = f * z + coeffs_[k];
  return f;
}

Complex Polynomial::derivative(Complex z) const noexcept {
  Complex f = coeffs_.back(), f1 = 0.0;
  for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
    f1 = f1 * z + f;
    f = f * z + coeffs_[k];
  }
  return f1;
}

Polynomial::Jet Polynomial::jet(Complex z) const noexcept {
  for (const auto& e : local_) {
    if (std::abs(z - e.center) < e.radius) {
      const auto j = horner_jet(e.taylor, z - e.center);
      return {j.f, j.f1, j.f2};
    }
  }
  const auto j = horner_jet(coeffs_, z);
  return {j.f, j.f1, j.f2};
}

std::vector<Complex> Polynomial::taylor_at(Complex z0) const {
  std::vector<Complex> c = coeffs_;
  const std::size_t n = c.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = n - 1; j-- > k;) c[j] += z0 * c[j + 1];
  return c;
}

std::vector<Complex> Polynomial::derivative_coeffs() const {
  std::vector<Complex> out;
  for (int k = 1; k <= degree_; ++k) out.push_back(static_cast<double>(k) * coeffs_[k]);
  return out;
}

std::string Polynomial::str() const {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) os << ',';
    os << '[' << coeffs_[k].real() << ',' << coeffs_[k].imag() << ']';
  }
  os << ']';
  return os.str();
}

IterateJet iterate_jet(const Polynomial& P, Complex z, int n) noexcept {
  Complex d1 = 1.0, d2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto j = P.jet(z);
    d2 = j.d2 * d1 * d1 + j.d1 * d2;
    d1 = j.d1 * d1;
    z = j.value;
  }
  return {z, d1, d2};
}

Complex iterate(const Polynomial& P, Complex z, int n) noexcept {
  for (int k = 0; k < n; ++k) z = P(z);
  return z;
}

std::vector<Complex> iterate_series(const Polynomial& P, Complex z0, int n, int order) {
  const int len = order + 1;
  // s holds P^k(z0 + h) - P^k(z0) truncated, plus the base point.
  std::vector<Complex> s(len, 0.0);
  Complex base = z0;
  if (len > 1) s[1] = 1.0;
  for (int step = 0; step < n; ++step) {
    const auto t = P.taylor_at(base);
    std::vector<Complex> out(len, 0.0), power(len, 0.0);
    power[0] = 1.0;
    out[0] = t[0];
    for (std::size_t j = 1; j < t.size(); ++j) {
      std::vector<Complex> next(len, 0.0);
      for (int a = 0; a < len; ++a) {
        if (power[a] == 0.0) continue;
        for (int b = 1; a + b < len; ++b) next[a + b] += power[a] * s[b];
      }
      power = std::move(next);
      for (int a = 0; a < len; ++a) out[a] += t[j] * power[a];
    }
    base = out[0];
    s = out;
    s[0] = 0.0;
  }
  s[0] = base;
  return s;
}

EscapeResult escape_time(const Polynomial& P, Complex z, int max_iter) {
  if (max_iter < 1) throw Error(ErrorCode::InvalidInput, "max_iter must be >= 1");
  const double r2 = P.escape_radius() * P.escape_radius();
  for (int step = 1; step <= max_iter; ++step) {
    z = P(z);
    if (std::norm(z) > r2) return {true, step, z};
  }
  return {false, max_iter, z};
}

double green_potential(const Polynomial& P, Complex z, int max_iter) {
  const double log_d = std::log(static_cast<double>(P.degree()));
  for (int n = 0; n <= max_iter; ++n) {
    const double a = std::abs(z);
    if (a > 1e40) return std::log(a) * std::exp(-n * log_d);
    z = P(z);
  }
  return 0.0;
}

std::vector<Complex> aberth(int n, const std::function<Complex(Complex)>& ratio, double radius,
                            int max_iter) {
  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, kTwoPi * k / n + 0.4);
  std::vector<bool> done(n, false);
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (int k = 0; k < n; ++k) {
      if (done[k]) continue;
      const Complex w = ratio(z[k]);
      Complex s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const Complex step = w / (1.0 - w * s);
      if (!finite(step)) continue;
      z[k] -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z[k])))
        done[k] = true;
      else
        all = false;
    }
    if (all) break;
  }
  return z;
}

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
  std::vector<Complex> c(coeffs.begin(), coeffs.end());
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  double bound = 0.0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[k] / c[n]));
  const double radius = 1.0 + bound;
  auto ratio = [&](Complex z) {
    const auto j = horner_jet(c, z);
    return j.f / j.f1;
  };
  auto roots = aberth(n, ratio, 0.5 * radius);
  for (auto& r : roots) {
    r = polish(r, [&](Complex z) { return horner_jet(c, z); });
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

std::vector<Complex> critical_points(const Polynomial& P) {
  const auto dc = P.derivative_coeffs();
  auto roots = polynomial_roots(dc);
  for (const auto& r : roots) {
    const double res = std::abs(P.derivative(r));
    if (!(res < 1e-8))
      throw Error(ErrorCode::NonConvergence,
                  "critical point residual " + std::to_string(res) + " exceeds 1e-8");
  }
  return roots;
}

const char* to_string(CycleKind kind) noexcept {
  switch (kind) {
    case CycleKind::Attracting: return "attracting";
    case CycleKind::Repelling: return "repelling";
    case CycleKind::Parabolic: return "parabolic";
    case CycleKind::NeutralIrrational: return "neutral-irrational";
  }
  return "unknown";
}

CycleKind classify_multiplier(Complex lambda) noexcept {
  const double r = std::abs(lambda);
  if (r < 1.0 - 1e-6) return CycleKind::Attracting;
  if (r > 1.0 + 1e-6) return CycleKind::Repelling;
  const double turns = std::arg(lambda) / kTwoPi;
  for (int q = 1; q <= 64; ++q) {
    const double p = std::round(turns * q);
    if (std::abs(lambda - std::polar(1.0, kTwoPi * p / q)) < 1e-6) return CycleKind::Parabolic;
  }
  return CycleKind::NeutralIrrational;
}

Complex cycle_multiplier(const Polynomial& P, std::span<const Complex> orbit) noexcept {
  Complex m = 1.0;
  for (const auto& z : orbit) m *= P.derivative(z);
  return m;
}

namespace {

HornerJet fixed_jet(const Polynomial& P, Complex z, int n) {
  const auto j = iterate_jet(P, z, n);
  return {j.value - z, j.d1 - 1.0, j.d2};
}

bool is_lower_period(const Polynomial& P, Complex z, int m) {
  const Complex w = polish(z, [&](Complex x) { return fixed_jet(P, x, m); }, 40);
  return std::abs(w - z) < 1e-4 && std::abs(iterate(P, w, m) - w) < 1e-8;
}

int exact_period(const Polynomial& P, Complex z, int n) {
  for (int m = 1; m < n; ++m)
    if (n % m == 0 && is_lower_period(P, z, m)) return m;
  return n;
}

std::vector<Complex> period_candidates(const Polynomial& P, int n, const SeedGrid& seeds,
                                       std::vector<Complex>& failed) {
  const int d = P.degree();
  const double big = std::pow(static_cast<double>(d), n);
  const double R = P.escape_radius();
  std::vector<Complex> out;
  auto jet = [&](Complex x) { return fixed_jet(P, x, n); };
  if (big <= 512.0) {
    auto ratio = [&](Complex x) {
      const auto j = jet(x);
      Complex r = j.f / j.f1;
      if (!finite(r)) r = x / big;
      return r;
    };
    for (auto z : aberth(static_cast<int>(big), ratio, 0.8 * R)) out.push_back(polish(z, jet));
    return out;
  }
  const double width = seeds.width > 0.0 ? seeds.width : 2.2 * R;
  for (int i = 0; i < seeds.n; ++i) {
    for (int k = 0; k < seeds.n; ++k) {
      Complex z = seeds.center + Complex(width * ((k + 0.5) / seeds.n - 0.5),
                                         width * (0.5 - (i + 0.5) / seeds.n));
      const Complex seed = z;
      bool ok = false;
      for (int it = 0; it < 80; ++it) {
        const auto j = jet(z);
        if (!finite(j.f) || std::abs(z) > 2.0 * R) break;
        Complex step = j.f / j.f1;
        if (!finite(step)) break;
        // Damping keeps wild first steps inside the search disk.
        const double cap = 0.25 * R;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) {
          ok = true;
          break;
        }
      }
      if (ok)
        out.push_back(polish(z, jet));
      else
        failed.push_back(seed);
    }
  }
  return out;
}

}  // namespace

CycleSearch find_cycles(const Polynomial& P, int max_period, const SeedGrid& seeds) {
  if (max_period < 1) throw Error(ErrorCode::InvalidInput, "max_period must be >= 1");
  if (std::pow(static_cast<double>(P.degree()), max_period) > 1e5)
    throw Error(ErrorCode::InvalidInput, "d^max_period exceeds 1e5");
  CycleSearch result;
  for (int n = 1; n <= max_period; ++n) {
    auto candidates = period_candidates(P, n, seeds, result.failed_seeds);
    std::sort(candidates.begin(), candidates.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (const auto& z0 : candidates) {
      if (std::abs(iterate(P, z0, n) - z0) > 1e-6) continue;
      if (exact_period(P, z0, n) != n) continue;
      bool known = false;
      for (const auto& c : result.cycles) {
        if (c.period != n) continue;
        for (const auto& p : c.points)
          if (std::abs(p - z0) < 1e-7) known = true;
        if (known) break;
      }
      if (known) continue;
      Cycle cycle;
      cycle.period = n;
      Complex z = z0;
      auto jet = [&](Complex x) { return fixed_jet(P, x, n); };
      for (int k = 0; k < n; ++k) {
        z = polish(z, jet, 8);
        cycle.points.push_back(z);
        z = P(z);
      }
      cycle.multiplier = cycle_multiplier(P, cycle.points);
      cycle.kind = classify_multiplier(cycle.multiplier);
      result.cycles.push_back(std::move(cycle));
    }
  }
  return result;
}

}  // namespace renorm
