#include <cmath>
#include <sstream>

#include "doctest.h"
#include "renorm/cuts.hpp"
#include "renorm/error.hpp"
#include "renorm/mask.hpp"

using namespace renorm;

namespace {

Mask disk_mask(const GridSpec& g, Complex c, double r) {
  Mask M(g);
  for (int i = 0; i < g.resolution; ++i)
    for (int j = 0; j < g.resolution; ++j) M.set(i, j, std::abs(g.pixel_center(i, j) - c) <= r);
  return M;
}

}  // namespace

TEST_CASE("pixel geometry follows the grid contract") {
  const GridSpec g{{1.0, -2.0}, 4.0, 16};
  const double s = 0.25;
  // Row 0 is the top edge, column 0 the left edge.
  CHECK(std::abs(g.pixel_center(0, 0) - Complex(1.0 - 2.0 + s / 2, -2.0 + 2.0 - s / 2)) < 1e-15);
  CHECK(std::abs(g.pixel_center(15, 15) - Complex(1.0 + 2.0 - s / 2, -2.0 - 2.0 + s / 2)) < 1e-15);
  CHECK(std::abs(g.pixel_center(0, 15) - Complex(3.0 - s / 2, 0.0 - s / 2)) < 1e-15);
  int i = -1, j = -1;
  REQUIRE(g.locate(g.pixel_center(3, 7), i, j));
  CHECK(i == 3);
  CHECK(j == 7);
  CHECK_FALSE(g.locate(Complex(10.0, 0.0), i, j));
  CHECK_THROWS_AS((GridSpec{{0.0, 0.0}, -1.0, 64}.validate()), Error);
  CHECK_THROWS_AS((GridSpec{{0.0, 0.0}, 1.0, 4}.validate()), Error);
}

TEST_CASE("filled Julia set of z^2 is the unit disk") {
  const Polynomial sq({0.0, 0.0, 1.0});
  const GridSpec g{{0.0, 0.0}, 3.0, 512};
  const Mask K = compute_mask(sq, nullptr, g, {512, 0, 1});
  const Mask D = disk_mask(g, 0.0, 1.0);
  std::size_t diff = 0;
  for (std::size_t k = 0; k < K.bits.size(); ++k) diff += K.bits[k] != D.bits[k];
  CHECK(static_cast<double>(diff) / K.bits.size() < 0.01);
  const auto cmp = compare_masks(K, D, 2);
  CHECK(cmp.strict_differences == 0);
}

TEST_CASE("supersampling uses a majority of quarter pixels") {
  const GridSpec g{{0.0, 0.0}, 2.0, 16};
  // Half-plane x > 0.05: column 8 samples x = 0.03125 and 0.09375, so 2 of 4 are inside.
  const Mask m = rasterize(g, [](Complex z) { return z.real() > 0.05; }, 1, 2);
  CHECK_FALSE(m.at(0, 8));
  CHECK(m.at(0, 9));
  CHECK_FALSE(m.at(0, 7));
  CHECK_THROWS_AS(rasterize(g, [](Complex) { return true; }, 1, 3), Error);
}

TEST_CASE("masks do not depend on the thread count") {
  const Polynomial P({0.0, 4.0, 4.0, 1.0});
  const GridSpec g{{-1.5, 0.0}, 3.8, 128};
  const Mask a = compute_mask(P, nullptr, g, {256, 1, 1});
  const Mask b = compute_mask(P, nullptr, g, {256, 4, 1});
  CHECK(a.bits == b.bits);
  CHECK(escape_counts(P, g, 256, 1) == escape_counts(P, g, 256, 3));
}

TEST_CASE("avoiding set is a strict subset of the filled Julia set") {
  const Polynomial P({0.0, 4.0, 4.0, 1.0});
  const auto Z = CutFamily::build(P, {{Angle(1, 3), Angle(2, 3)}, {Angle(0, 1), Angle(0, 1)}}, 0.5);
  const GridSpec g{{-1.5, 0.0}, 3.8, 256};
  const Mask K = compute_mask(P, nullptr, g, {512, 0, 1});
  const Mask A = compute_mask(P, &Z, g, {512, 0, 1});
  std::size_t outside = 0;
  for (std::size_t k = 0; k < A.bits.size(); ++k) outside += A.bits[k] && !K.bits[k];
  CHECK(outside == 0);
  CHECK(A.count() < K.count());
  CHECK(connected_components(A).count == 1);
  CHECK(avoids(P, &Z, -1.0, 512));
  CHECK_FALSE(avoids(P, &Z, -3.0, 512));
  CHECK(avoids(P, nullptr, -3.0, 512));
}

TEST_CASE("closing and connected components") {
  const GridSpec g{{0.0, 0.0}, 4.0, 64};
  Mask two = disk_mask(g, Complex(-1.0, 0.0), 0.5);
  const Mask right = disk_mask(g, Complex(1.0, 0.0), 0.5);
  for (std::size_t k = 0; k < two.bits.size(); ++k) two.bits[k] |= right.bits[k];
  const auto comps = connected_components(two);
  CHECK(comps.count == 2);
  REQUIRE(comps.sizes.size() == 2);
  CHECK(comps.sizes[0] >= comps.sizes[1]);

  // A one-pixel gap is bridged by the closing.
  Mask bar(g);
  for (int j = 10; j < 50; ++j)
    if (j != 30) bar.set(32, j, true);
  CHECK(connected_components(bar).count == 1);
  CHECK(close_mask(bar).at(32, 30));
}

TEST_CASE("mask comparison excludes a band around the boundaries") {
  const GridSpec g{{0.0, 0.0}, 4.0, 64};
  const Mask a = disk_mask(g, 0.0, 1.0);
  const Mask b = disk_mask(g, 0.0, 1.06);
  const auto loose = compare_masks(a, b, 2);
  CHECK(loose.strict_differences == 0);
  CHECK(loose.agreement < 1.0);
  const auto tight = compare_masks(a, disk_mask(g, 0.0, 1.5), 1);
  CHECK(tight.strict_differences > 0);
  CHECK_THROWS_AS(compare_masks(a, Mask(GridSpec{{0.0, 0.0}, 4.0, 32}), 1), Error);
}

TEST_CASE("raw mask dump round-trips") {
  const GridSpec g{{0.0, 0.0}, 4.0, 20};
  const Mask a = disk_mask(g, Complex(0.3, -0.2), 1.3);
  std::stringstream ss;
  write_raw_mask(ss, a);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 8) == "APLMASK1");
  CHECK(bytes.size() == 8 + 8 + (20 * 20 + 7) / 8);
  CHECK(static_cast<unsigned char>(bytes[8]) == 20);
  const Mask b = read_raw_mask(ss, g);
  CHECK(a.bits == b.bits);
}
