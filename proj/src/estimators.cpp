#include "renorm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "renorm/error.hpp"

namespace renorm {

namespace {

std::vector<Complex> pick(const Polyline& line, int samples) {
  const std::size_t n = line.size();
  if (samples < 3 || static_cast<std::size_t>(samples) >= n) return line;
  std::vector<Complex> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const std::size_t idx = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(n - 1) / (samples - 1)));
    out.push_back(line[idx]);
  }
  return out;
}

}  // namespace

double quasi_arc_constant(const Polyline& line, int samples) {
  const auto p = pick(line, samples);
  const std::size_t n = p.size();
  if (n < 3) throw Error(ErrorCode::InsufficientSamples, "quasi-arc estimate needs three points");
  double best = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double reach = 0.0;  // max |x_i - x_j| for i < j < k
    for (std::size_t k = i + 1; k < n; ++k) {
      if (reach > 0.0) best = std::min(best, std::abs(p[i] - p[k]) / reach);
      reach = std::max(reach, std::abs(p[i] - p[k]));
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double reach = 0.0;  // max |x_k - x_j| for i < j < k
    for (std::size_t i = k; i-- > 0;) {
      if (reach > 0.0) best = std::min(best, std::abs(p[i] - p[k]) / reach);
      reach = std::max(reach, std::abs(p[i] - p[k]));
    }
  }
  return best;
}

TransversalityResult transversality_gap(const Polyline& R, const Polyline& L, Complex a, double min_scale) {
  if (R.empty() || L.empty()) throw Error(ErrorCode::InsufficientSamples, "empty arc");
  if (!(min_scale > 0.0)) throw Error(ErrorCode::InvalidInput, "min_scale must be positive");
  auto max_dist = [&](const Polyline& arc) {
    double m = 0.0;
    for (const auto& p : arc) m = std::max(m, std::abs(p - a));
    return m;
  };
  const double top = std::min(max_dist(R), max_dist(L));
  const int bands = std::max(1, static_cast<int>(std::ceil(std::log2(top / min_scale))));

  auto band_of = [&](Complex p) {
    const double r = std::abs(p - a);
    if (!(r > 0.0) || r > top) return -1;
    return static_cast<int>(std::floor(std::log2(top / r)));
  };
  std::vector<std::vector<Complex>> lb(bands + 2);
  for (const auto& v : L) {
    const int b = band_of(v);
    if (b >= 0 && b < bands + 2) lb[b].push_back(v);
  }
  std::vector<double> band_gap(bands, HUGE_VAL);
  TransversalityResult out;
  for (const auto& u : R) {
    const int b = band_of(u);
    if (b < 0 || b >= bands) continue;
    const double ru = std::abs(u - a);
    for (int nb = std::max(0, b - 1); nb <= b + 1; ++nb)
      for (const auto& v : lb[nb]) {
        const double ratio = ru / std::abs(v - a);
        if (std::abs(ratio - 1.0) >= 0.1) continue;
        ++out.pairs;
        band_gap[b] = std::min(band_gap[b], std::abs((u - a) / (v - a) - 1.0));
      }
  }
  out.gap = HUGE_VAL;
  for (int b = 0; b < bands; ++b) {
    if (!std::isfinite(band_gap[b]))
      throw Error(ErrorCode::InsufficientSamples,
                  "no comparable pairs at distance " + std::to_string(top * std::ldexp(1.0, -b)) + " from the root");
    out.gap = std::min(out.gap, band_gap[b]);
  }
  out.scales = bands;
  out.transverse = out.gap > 0.1;
  return out;
}

double weak_qs_constant(const std::vector<std::pair<Complex, Complex>>& samples) {
  const std::size_t n = samples.size();
  if (n < 100) throw Error(ErrorCode::InsufficientSamples, "weak quasi-symmetry estimate needs >= 100 samples");
  double kappa = 1.0;
  std::vector<std::size_t> order(n);
  std::vector<double> dist(n), suffix(n + 1);
  for (std::size_t x = 0; x < n; ++x) {
    const Complex px = samples[x].first, fx = samples[x].second;
    for (std::size_t j = 0; j < n; ++j) dist[j] = std::abs(samples[j].first - px);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return dist[i] < dist[j]; });
    // suffix[k] = min image distance over order[k..], skipping x itself.
    suffix[n] = HUGE_VAL;
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t j = order[k];
      const double fd = j == x ? HUGE_VAL : std::abs(samples[j].second - fx);
      suffix[k] = std::min(suffix[k + 1], fd);
    }
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t y = order[k];
      if (y == x) continue;
      // First position whose distance is >= dist[y]; ties count as admissible z.
      std::size_t lo = k;
      while (lo > 0 && dist[order[lo - 1]] >= dist[y]) --lo;
      const double denom = suffix[lo];
      const double num = std::abs(samples[y].second - fx);
      if (denom == 0.0) return std::numeric_limits<double>::infinity();
      kappa = std::max(kappa, num / denom);
    }
  }
  return kappa;
}

}  // namespace renorm
