#include "renorm/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace renorm {

namespace {

double cross(Complex a, Complex b) noexcept { return a.real() * b.imag() - a.imag() * b.real(); }

int orientation(Complex a, Complex b, Complex c) noexcept {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Complex a, Complex b, Complex p) noexcept {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

}  // namespace

double distance_to_segment(Complex p, Complex a, Complex b) noexcept {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double distance_to_polygon(Complex p, const Polyline& closed) noexcept {
  double best = HUGE_VAL;
  const std::size_t n = closed.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, distance_to_segment(p, closed[i], closed[(i + 1) % n]));
  return best;
}

double distance_to_polyline(Complex p, const Polyline& line) noexcept {
  if (line.size() == 1) return std::abs(p - line[0]);
  double best = HUGE_VAL;
  for (std::size_t i = 0; i + 1 < line.size(); ++i)
    best = std::min(best, distance_to_segment(p, line[i], line[i + 1]));
  return best;
}

bool crossing_inside(Complex p, const Polyline& closed) noexcept {
  bool inside = false;
  const std::size_t n = closed.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Complex a = closed[i], b = closed[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) noexcept {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple_polygon(const Polyline& closed) {
  const std::size_t n = closed.size();
  if (n < 3) return false;
  // Sort edges by their lower x so each edge is compared only against overlapping ones.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto lo = [&](std::size_t i) { return std::min(closed[i].real(), closed[(i + 1) % n].real()); };
  auto hi = [&](std::size_t i) { return std::max(closed[i].real(), closed[(i + 1) % n].real()); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lo(a) < lo(b); });
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = order[s];
    for (std::size_t t = s + 1; t < n && lo(order[t]) <= hi(i); ++t) {
      const std::size_t j = order[t];
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap <= 1 || gap == n - 1) continue;
      if (segments_intersect(closed[i], closed[(i + 1) % n], closed[j], closed[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

PolygonIndex::PolygonIndex(Polyline closed, int cells, double margin)
    : poly_(std::move(closed)), n_(cells), margin_(margin) {
  if (poly_.size() < 3) return;
  double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
  for (const auto& p : poly_) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  }
  const double pad = 1e-6 * std::max({1.0, x1 - x0, y1 - y0});
  lo_ = {x0 - pad, y0 - pad};
  hi_ = {x1 + pad, y1 + pad};
  cw_ = (hi_.real() - lo_.real()) / n_;
  ch_ = (hi_.imag() - lo_.imag()) / n_;
  cell_.assign(static_cast<std::size_t>(n_) * n_, kOutside);
  edges_.assign(cell_.size(), {});

  const std::size_t m = poly_.size();
  auto clampi = [&](double v) { return std::clamp(static_cast<int>(std::floor(v)), 0, n_ - 1); };
  for (std::size_t e = 0; e < m; ++e) {
    const Complex a = poly_[e], b = poly_[(e + 1) % m];
    const int c0 = clampi((std::min(a.real(), b.real()) - margin_ - lo_.real()) / cw_);
    const int c1 = clampi((std::max(a.real(), b.real()) + margin_ - lo_.real()) / cw_);
    const int r0 = clampi((std::min(a.imag(), b.imag()) - margin_ - lo_.imag()) / ch_);
    const int r1 = clampi((std::max(a.imag(), b.imag()) + margin_ - lo_.imag()) / ch_);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const std::size_t idx = static_cast<std::size_t>(r) * n_ + c;
        cell_[idx] = kBoundary;
        edges_[idx].push_back(static_cast<int>(e));
      }
  }

  // Scanline parity through each row's centre line classifies the untouched cells.
  std::vector<double> xs;
  for (int r = 0; r < n_; ++r) {
    const double y = lo_.imag() + (r + 0.5) * ch_;
    xs.clear();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
      const Complex a = poly_[i], b = poly_[j];
      if ((a.imag() > y) != (b.imag() > y))
        xs.push_back(a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag()));
    }
    std::sort(xs.begin(), xs.end());
    std::size_t k = 0;
    for (int c = 0; c < n_; ++c) {
      const double x = lo_.real() + (c + 0.5) * cw_;
      while (k < xs.size() && xs[k] <= x) ++k;
      const std::size_t idx = static_cast<std::size_t>(r) * n_ + c;
      if (cell_[idx] != kBoundary) cell_[idx] = (k % 2 == 1) ? kInside : kOutside;
    }
  }
}

bool PolygonIndex::exact(Complex p) const noexcept {
  const int c = std::clamp(static_cast<int>((p.real() - lo_.real()) / cw_), 0, n_ - 1);
  const int r = std::clamp(static_cast<int>((p.imag() - lo_.imag()) / ch_), 0, n_ - 1);
  const std::size_t m = poly_.size();
  for (int e : edges_[static_cast<std::size_t>(r) * n_ + c])
    if (distance_to_segment(p, poly_[e], poly_[(e + 1) % m]) <= margin_) return false;
  return crossing_inside(p, poly_);
}

bool PolygonIndex::contains(Complex p) const noexcept {
  if (poly_.size() < 3) return false;
  if (!(p.real() >= lo_.real() && p.real() < hi_.real() && p.imag() >= lo_.imag() &&
        p.imag() < hi_.imag()))
    return false;
  const int c = std::min(static_cast<int>((p.real() - lo_.real()) / cw_), n_ - 1);
  const int r = std::min(static_cast<int>((p.imag() - lo_.imag()) / ch_), n_ - 1);
  const auto state = cell_[static_cast<std::size_t>(r) * n_ + c];
  if (state == kBoundary) return exact(p);
  return state == kInside;
}

}  // namespace renorm
