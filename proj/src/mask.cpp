#include "renorm/mask.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "renorm/cuts.hpp"
#include "renorm/error.hpp"
#include "renorm/parallel.hpp"

namespace renorm {

void GridSpec::validate() const {
  if (!(width > 0.0)) throw Error(ErrorCode::InvalidInput, "grid width must be positive");
  if (resolution < 16) throw Error(ErrorCode::InvalidInput, "grid resolution must be >= 16");
}

Complex GridSpec::pixel_center(int i, int j) const noexcept {
  const double step = width / resolution;
  return {center.real() - 0.5 * width + (j + 0.5) * step, center.imag() + 0.5 * width - (i + 0.5) * step};
}

bool GridSpec::locate(Complex z, int& i, int& j) const noexcept {
  const double step = width / resolution;
  const double x = (z.real() - (center.real() - 0.5 * width)) / step;
  const double y = ((center.imag() + 0.5 * width) - z.imag()) / step;
  if (!(x >= 0.0 && y >= 0.0 && x < resolution && y < resolution)) return false;
  j = static_cast<int>(x);
  i = static_cast<int>(y);
  return true;
}

Mask::Mask(const GridSpec& g) : grid(g), bits(static_cast<std::size_t>(g.resolution) * g.resolution, 0) {}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Mask rasterize(const GridSpec& grid, const SamplePredicate& inside, int threads, int supersample) {
  grid.validate();
  if (supersample != 1 && supersample != 2)
    throw Error(ErrorCode::InvalidInput, "supersample must be 1 or 2");
  Mask M(grid);
  const int n = grid.resolution;
  const double q = 0.25 * grid.pixel_size();
  parallel_for(0, n, threads, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const Complex c = grid.pixel_center(i, j);
      bool v;
      if (supersample == 1) {
        v = inside(c);
      } else {
        int votes = 0;
        for (const Complex off : {Complex(-q, q), Complex(q, q), Complex(-q, -q), Complex(q, -q)})
          votes += inside(c + off) ? 1 : 0;
        v = votes >= 3;
      }
      M.set(i, j, v);
    }
  });
  return M;
}

bool avoids(const Polynomial& P, const CutFamily* Z, Complex z, int max_iter) {
  const double r2 = P.escape_radius() * P.escape_radius();
  const bool test = Z && !Z->empty();
  if (test && Z->in_any_wedge(z)) return false;
  for (int k = 0; k < max_iter; ++k) {
    z = P(z);
    if (std::norm(z) > r2) return false;
    if (test && Z->in_any_wedge(z)) return false;
  }
  return true;
}

Mask compute_mask(const Polynomial& P, const CutFamily* Z, const GridSpec& grid, const MaskOptions& opts) {
  return rasterize(grid, [&](Complex z) { return avoids(P, Z, z, opts.max_iter); }, opts.threads,
                   opts.supersample);
}

std::vector<int> escape_counts(const Polynomial& P, const GridSpec& grid, int max_iter, int threads) {
  grid.validate();
  const int n = grid.resolution;
  std::vector<int> out(static_cast<std::size_t>(n) * n, 0);
  parallel_for(0, n, threads, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const auto r = escape_time(P, grid.pixel_center(i, j), max_iter);
      out[static_cast<std::size_t>(i) * n + j] = r.escaped ? r.steps : 0;
    }
  });
  return out;
}

namespace {

// Square (Chebyshev) max or min filter of the given radius; `outside` is the value
// assumed beyond the image edge.
std::vector<std::uint8_t> square_filter(const std::vector<std::uint8_t>& src, int n, int radius, bool take_max,
                                        std::uint8_t outside) {
  std::vector<std::uint8_t> tmp(src.size()), dst(src.size());
  auto pass = [&](const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out, bool rows) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        std::uint8_t acc = take_max ? 0 : 1;
        for (int k = -radius; k <= radius; ++k) {
          const int c = b + k;
          std::uint8_t v;
          if (c < 0 || c >= n)
            v = outside;
          else
            v = rows ? in[static_cast<std::size_t>(a) * n + c] : in[static_cast<std::size_t>(c) * n + a];
          acc = take_max ? std::max(acc, v) : std::min(acc, v);
        }
        if (rows)
          out[static_cast<std::size_t>(a) * n + b] = acc;
        else
          out[static_cast<std::size_t>(b) * n + a] = acc;
      }
    }
  };
  pass(src, tmp, true);
  pass(tmp, dst, false);
  return dst;
}

std::vector<std::uint8_t> boundary_of(const Mask& M) {
  const int n = M.grid.resolution;
  std::vector<std::uint8_t> out(M.bits.size(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool v = M.at(i, j);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          if (M.at(a, b) != v) out[static_cast<std::size_t>(i) * n + j] = 1;
        }
    }
  return out;
}

}  // namespace

Mask close_mask(const Mask& M, int radius) {
  Mask out(M.grid);
  const auto dil = square_filter(M.bits, M.grid.resolution, radius, true, 0);
  out.bits = square_filter(dil, M.grid.resolution, radius, false, 1);
  return out;
}

Components connected_components(const Mask& M) {
  const Mask C = close_mask(M, 1);
  const int n = C.grid.resolution;
  std::vector<int> label(C.bits.size(), -1);
  Components out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < C.bits.size(); ++s) {
    if (!C.bits[s] || label[s] >= 0) continue;
    const int id = out.count++;
    std::size_t size = 0;
    stack.push_back(s);
    label[s] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int i = static_cast<int>(p / n), j = static_cast<int>(p % n);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          const std::size_t q = static_cast<std::size_t>(a) * n + b;
          if (C.bits[q] && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
    }
    out.sizes.push_back(size);
  }
  std::sort(out.sizes.rbegin(), out.sizes.rend());
  return out;
}

MaskComparison compare_masks(const Mask& A, const Mask& B, int band) {
  if (!(A.grid == B.grid) || A.bits.size() != B.bits.size())
    throw Error(ErrorCode::GridMismatch, "masks have different grids");
  const int n = A.grid.resolution;
  auto edge = boundary_of(A);
  const auto eb = boundary_of(B);
  for (std::size_t k = 0; k < edge.size(); ++k) edge[k] |= eb[k];
  const auto zone = band > 0 ? square_filter(edge, n, band, true, 0) : edge;
  MaskComparison out;
  std::size_t equal = 0, outside = 0;
  for (std::size_t k = 0; k < A.bits.size(); ++k) {
    const bool same = A.bits[k] == B.bits[k];
    equal += same;
    if (band > 0 && zone[k]) {
      ++out.band_excluded;
      continue;
    }
    ++outside;
    if (!same) ++out.strict_differences;
  }
  out.agreement = static_cast<double>(equal) / static_cast<double>(A.bits.size());
  out.strict_agreement = outside ? 1.0 - static_cast<double>(out.strict_differences) / outside : 1.0;
  return out;
}

void write_raw_mask(std::ostream& os, const Mask& M) {
  const std::uint32_t w = M.grid.resolution, h = M.grid.resolution;
  os.write("APLMASK1", 8);
  std::array<unsigned char, 8> dims{};
  for (int k = 0; k < 4; ++k) {
    dims[k] = static_cast<unsigned char>((w >> (8 * k)) & 0xFF);
    dims[4 + k] = static_cast<unsigned char>((h >> (8 * k)) & 0xFF);
  }
  os.write(reinterpret_cast<const char*>(dims.data()), 8);
  std::vector<unsigned char> packed((M.bits.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < M.bits.size(); ++k)
    if (M.bits[k]) packed[k / 8] |= static_cast<unsigned char>(0x80u >> (k % 8));
  os.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
}

Mask read_raw_mask(std::istream& is, const GridSpec& grid) {
  char magic[8];
  unsigned char dims[8];
  if (!is.read(magic, 8) || std::memcmp(magic, "APLMASK1", 8) != 0)
    throw Error(ErrorCode::InvalidInput, "bad mask magic");
  if (!is.read(reinterpret_cast<char*>(dims), 8)) throw Error(ErrorCode::InvalidInput, "truncated mask header");
  std::uint32_t w = 0, h = 0;
  for (int k = 0; k < 4; ++k) {
    w |= static_cast<std::uint32_t>(dims[k]) << (8 * k);
    h |= static_cast<std::uint32_t>(dims[4 + k]) << (8 * k);
  }
  if (w != static_cast<std::uint32_t>(grid.resolution) || h != w)
    throw Error(ErrorCode::GridMismatch, "mask dimensions do not match the grid");
  Mask M(grid);
  std::vector<unsigned char> packed((M.bits.size() + 7) / 8);
  if (!is.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size())))
    throw Error(ErrorCode::InvalidInput, "truncated mask payload");
  for (std::size_t k = 0; k < M.bits.size(); ++k) M.bits[k] = (packed[k / 8] >> (7 - k % 8)) & 1u;
  return M;
}

}  // namespace renorm
