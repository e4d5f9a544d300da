#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "renorm/geometry.hpp"
#include "renorm/mask.hpp"
#include "renorm/scene.hpp"

namespace renorm {

using Rgb = std::array<std::uint8_t, 3>;

struct Colors {
  Rgb avoiding{64, 64, 64};
  Rgb filled{160, 160, 160};
  Rgb wedge{200, 200, 255};
  Rgb ray{0, 0, 0};
  Rgb carrot{255, 0, 0};
  Rgb exterior_near{40, 60, 120};  // slow escape
  Rgb exterior_far{255, 255, 255}; // fast escape
};

Colors palette_colors(Palette p);

class Image {
 public:
  Image(int width, int height, Rgb fill = {255, 255, 255});

  int width() const noexcept { return w_; }
  int height() const noexcept { return h_; }
  Rgb at(int i, int j) const noexcept;
  void set(int i, int j, Rgb c) noexcept;
  const std::vector<std::uint8_t>& bytes() const noexcept { return rgb_; }

  // "P6\n{w} {h}\n255\n" followed by row-major RGB, top row first.
  void write_ppm(std::ostream& os) const;
  void save_ppm(const std::string& path) const;

 private:
  int w_, h_;
  std::vector<std::uint8_t> rgb_;
};

Image read_ppm(std::istream& is);

// Plane segment rasterized with a DDA at one step per pixel; parts outside the
// window are skipped.
void draw_segment(Image& img, const GridSpec& grid, Complex a, Complex b, Rgb c);
void draw_polyline(Image& img, const GridSpec& grid, const Polyline& line, Rgb c, bool closed = false);

struct Layers {
  const Mask* filled = nullptr;       // K_P
  const Mask* avoiding = nullptr;     // A_P(Z)
  const Mask* wedges = nullptr;       // pixels inside some wedge
  const std::vector<int>* escape = nullptr;  // escape counts, 0 for bounded
  int max_iter = 512;
  std::vector<Polyline> rays;
  std::vector<Polyline> carrots;      // closed boundaries
};

Image compose(const GridSpec& grid, const Layers& layers, const Colors& colors);

// Rows "curve,index,re,im" for each named polyline.
std::string polylines_csv(const std::vector<std::pair<std::string, Polyline>>& curves);

// Deterministic decimal formatting for CSV cells.
std::string csv_number(double x);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace renorm
