#include "renorm/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "renorm/error.hpp"

namespace renorm {

Colors palette_colors(Palette p) {
  Colors c;
  if (p == Palette::Grey) {
    c.wedge = {210, 210, 210};
    c.carrot = {110, 110, 110};
    c.exterior_near = {90, 90, 90};
  }
  return c;
}

Image::Image(int width, int height, Rgb fill) : w_(width), h_(height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidInput, "image dimensions must be positive");
  rgb_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t k = 0; k < rgb_.size(); k += 3) std::copy(fill.begin(), fill.end(), rgb_.begin() + k);
}

Rgb Image::at(int i, int j) const noexcept {
  const std::size_t k = (static_cast<std::size_t>(i) * w_ + j) * 3;
  return {rgb_[k], rgb_[k + 1], rgb_[k + 2]};
}

void Image::set(int i, int j, Rgb c) noexcept {
  if (i < 0 || j < 0 || i >= h_ || j >= w_) return;
  const std::size_t k = (static_cast<std::size_t>(i) * w_ + j) * 3;
  std::copy(c.begin(), c.end(), rgb_.begin() + k);
}

void Image::write_ppm(std::ostream& os) const {
  os << "P6\n" << w_ << ' ' << h_ << "\n255\n";
  os.write(reinterpret_cast<const char*>(rgb_.data()), static_cast<std::streamsize>(rgb_.size()));
  if (!os) throw Error(ErrorCode::InvalidInput, "failed to write image");
}

void Image::save_ppm(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot open " + path + " for writing");
  write_ppm(out);
}

Image read_ppm(std::istream& is) {
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  is >> magic >> w >> h >> maxval;
  if (magic != "P6" || w < 1 || h < 1 || maxval != 255) throw Error(ErrorCode::InvalidInput, "not a P6 image");
  is.get();
  Image img(w, h);
  std::vector<char> buf(static_cast<std::size_t>(w) * h * 3);
  is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!is) throw Error(ErrorCode::InvalidInput, "truncated P6 image");
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const std::size_t k = (static_cast<std::size_t>(i) * w + j) * 3;
      img.set(i, j, {static_cast<std::uint8_t>(buf[k]), static_cast<std::uint8_t>(buf[k + 1]),
                     static_cast<std::uint8_t>(buf[k + 2])});
    }
  return img;
}

void draw_segment(Image& img, const GridSpec& grid, Complex a, Complex b, Rgb c) {
  const double step = grid.pixel_size();
  const double x0 = (a.real() - (grid.center.real() - 0.5 * grid.width)) / step;
  const double y0 = ((grid.center.imag() + 0.5 * grid.width) - a.imag()) / step;
  const double x1 = (b.real() - (grid.center.real() - 0.5 * grid.width)) / step;
  const double y1 = ((grid.center.imag() + 0.5 * grid.width) - b.imag()) / step;
  if (!std::isfinite(x0 + y0 + x1 + y1)) return;
  const double n = std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)));
  // Segments far outside the window are not worth stepping through.
  if (n > 64.0 * grid.resolution) return;
  const int steps = std::max(1, static_cast<int>(n));
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const double x = x0 + t * (x1 - x0), y = y0 + t * (y1 - y0);
    if (x < 0.0 || y < 0.0 || x >= grid.resolution || y >= grid.resolution) continue;
    img.set(static_cast<int>(y), static_cast<int>(x), c);
  }
}

void draw_polyline(Image& img, const GridSpec& grid, const Polyline& line, Rgb c, bool closed) {
  for (std::size_t k = 0; k + 1 < line.size(); ++k) draw_segment(img, grid, line[k], line[k + 1], c);
  if (closed && line.size() > 2) draw_segment(img, grid, line.back(), line.front(), c);
}

Image compose(const GridSpec& grid, const Layers& layers, const Colors& colors) {
  const int n = grid.resolution;
  Image img(n, n, colors.exterior_far);
  const double log_max = std::log1p(static_cast<double>(std::max(1, layers.max_iter)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      Rgb c = colors.exterior_far;
      if (layers.escape && (*layers.escape)[k] > 0) {
        // Slow escapers are darker; the count is spread on a log scale.
        const double t = std::clamp(std::log1p((*layers.escape)[k]) / log_max, 0.0, 1.0);
        for (int ch = 0; ch < 3; ++ch)
          c[ch] = static_cast<std::uint8_t>(
              std::lround(colors.exterior_far[ch] + t * (colors.exterior_near[ch] - colors.exterior_far[ch])));
      }
      if (layers.wedges && layers.wedges->bits[k]) c = colors.wedge;
      if (layers.filled && layers.filled->bits[k]) c = colors.filled;
      if (layers.avoiding && layers.avoiding->bits[k]) c = colors.avoiding;
      img.set(i, j, c);
    }
  for (const auto& r : layers.rays) draw_polyline(img, grid, r, colors.ray);
  for (const auto& b : layers.carrots) draw_polyline(img, grid, b, colors.carrot, true);
  return img;
}

std::string csv_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string polylines_csv(const std::vector<std::pair<std::string, Polyline>>& curves) {
  std::ostringstream os;
  os << "curve,index,re,im\n";
  for (const auto& [name, line] : curves)
    for (std::size_t k = 0; k < line.size(); ++k)
      os << name << ',' << k << ',' << csv_number(line[k].real()) << ',' << csv_number(line[k].imag()) << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidInput, "failed to write " + path);
}

}  // namespace renorm
