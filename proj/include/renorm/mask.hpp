#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "renorm/poly.hpp"

namespace renorm {

class CutFamily;

// Square window; pixel (i, j) is row i from the top, column j from the left.
struct GridSpec {
  Complex center{0.0, 0.0};
  double width = 4.0;
  int resolution = 512;

  void validate() const;
  Complex pixel_center(int i, int j) const noexcept;
  double pixel_size() const noexcept { return width / resolution; }
  // Pixel containing z, or false when outside the window.
  bool locate(Complex z, int& i, int& j) const noexcept;
  bool operator==(const GridSpec&) const = default;
};

struct Mask {
  GridSpec grid;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  Mask() = default;
  explicit Mask(const GridSpec& g);
  bool at(int i, int j) const noexcept { return bits[static_cast<std::size_t>(i) * grid.resolution + j] != 0; }
  void set(int i, int j, bool v) noexcept { bits[static_cast<std::size_t>(i) * grid.resolution + j] = v; }
  std::size_t count() const noexcept;
};

struct MaskOptions {
  int max_iter = 512;
  int threads = 0;
  int supersample = 1;  // 1 or 2
};

// Per-sample membership predicate used by the supersampling driver.
using SamplePredicate = std::function<bool(Complex)>;

// Pixel set when the predicate holds at the pixel centre, or (supersample 2) at a
// majority (>= 3 of 4) of the quarter-pixel centres.
Mask rasterize(const GridSpec& grid, const SamplePredicate& inside, int threads, int supersample);

// Filled Julia set (Z null) or avoiding set A_P(Z).
Mask compute_mask(const Polynomial& P, const CutFamily* Z, const GridSpec& grid, const MaskOptions& opts = {});

// Single-point version of the mask rule.
bool avoids(const Polynomial& P, const CutFamily* Z, Complex z, int max_iter);

// Escape counts per pixel centre (0 for points that never escape), for shading.
std::vector<int> escape_counts(const Polynomial& P, const GridSpec& grid, int max_iter, int threads);

Mask close_mask(const Mask& M, int radius = 1);

struct Components {
  int count = 0;
  std::vector<std::size_t> sizes;  // descending
};

// 8-connectivity labelling after one closing pass.
Components connected_components(const Mask& M);

struct MaskComparison {
  double agreement = 0.0;           // equal pixels / all pixels
  std::size_t strict_differences = 0;  // differing pixels outside the boundary band
  std::size_t band_excluded = 0;       // pixels inside the band
  double strict_agreement = 0.0;       // 1 - strict_differences / pixels outside the band
};

MaskComparison compare_masks(const Mask& A, const Mask& B, int band);

// Raw dump: "APLMASK1", u32 width, u32 height (little-endian), then the bits packed
// eight per byte, most significant bit first, row-major.
void write_raw_mask(std::ostream& os, const Mask& M);
Mask read_raw_mask(std::istream& is, const GridSpec& grid);

}  // namespace renorm
