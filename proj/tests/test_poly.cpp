#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "doctest.h"
#include "renorm/error.hpp"
#include "renorm/poly.hpp"

using namespace renorm;
using Big = boost::multiprecision::mpfr_float_100;

namespace {

const Polynomial kFig1({0.0, 4.0, 4.0, 1.0});  // z (z + 2)^2

// Green potential in 100-digit arithmetic: log|P^n z| / d^n once |P^n z| is astronomically
// large, so the truncation error is far below double precision.
double mp_green(const std::vector<Complex>& coeffs, Complex z0, int n) {
  Big re = z0.real(), im = z0.imag();
  const int d = static_cast<int>(coeffs.size()) - 1;
  for (int k = 0; k < n; ++k) {
    Big ar = coeffs[d].real(), ai = coeffs[d].imag();
    for (int j = d - 1; j >= 0; --j) {
      const Big nr = ar * re - ai * im + coeffs[j].real();
      const Big ni = ar * im + ai * re + coeffs[j].imag();
      ar = nr;
      ai = ni;
    }
    re = ar;
    im = ai;
  }
  const Big mag2 = re * re + im * im;
  return static_cast<double>(log(mag2) / 2 / pow(Big(d), n));
}

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

bool contains(const std::vector<Complex>& pts, Complex z, double tol) {
  return std::any_of(pts.begin(), pts.end(), [&](Complex p) { return std::abs(p - z) < tol; });
}

}  // namespace

TEST_CASE("construction validates monic coefficients") {
  CHECK_THROWS_AS(Polynomial({1.0, 2.0}), Error);
  CHECK_THROWS_AS(Polynomial({0.0, 0.0, 2.0}), Error);
  CHECK_THROWS_AS(Polynomial({0.0, NAN, 1.0}), Error);
  CHECK(kFig1.degree() == 3);
  CHECK(kFig1.escape_radius() == doctest::Approx(9.0));
  CHECK(Polynomial({0.0, 0.0, 1.0}).escape_radius() == doctest::Approx(2.0));
}

TEST_CASE("evaluation and derivatives") {
  for (Complex z : {Complex(0.3, -0.7), Complex(-2.0, 0.0), Complex(1.5, 2.5)}) {
    CHECK(std::abs(kFig1(z) - z * (z + 2.0) * (z + 2.0)) < 1e-12);
    // P' = (3z + 2)(z + 2), P'' = 6z + 8 by hand.
    CHECK(std::abs(kFig1.derivative(z) - (3.0 * z + 2.0) * (z + 2.0)) < 1e-12);
    const auto j = kFig1.jet(z);
    CHECK(std::abs(j.d2 - (6.0 * z + 8.0)) < 1e-12);
  }
  // Near the critical point the value keeps relative precision: P(-2 + h) = h^2 (h - 2).
  const double z = -2.0 + 1e-9;
  const double h = z + 2.0;  // exact offset of the rounded point
  CHECK(std::abs(kFig1.jet(Complex(z, 0.0)).value - h * h * (h - 2.0)) < 1e-12 * h * h);
}

TEST_CASE("Taylor coefficients about a point") {
  const Complex z0(-0.4, 0.9);
  const auto t = kFig1.taylor_at(z0);
  REQUIRE(t.size() == 4);
  for (Complex h : {Complex(0.1, 0.0), Complex(-0.3, 0.2), Complex(0.0, 1.0)})
    CHECK(std::abs(horner(t, h) - kFig1(z0 + h)) < 1e-12);
  CHECK(std::abs(t[3] - 1.0) < 1e-15);
}

TEST_CASE("iterate jets agree with finite differences") {
  const Complex z(0.2, 0.3);
  const double h = 1e-6;
  const auto jet = iterate_jet(kFig1, z, 3);
  const Complex fd = (iterate(kFig1, z + h, 3) - iterate(kFig1, z - h, 3)) / (2 * h);
  CHECK(std::abs(jet.d1 - fd) < 1e-5 * std::abs(fd));
  CHECK(std::abs(jet.value - kFig1(kFig1(kFig1(z)))) < 1e-12);
}

TEST_CASE("roots and critical points") {
  // z (z + 1)(z + 3) = z^3 + 4 z^2 + 3 z.
  const std::vector<Complex> c{0.0, 3.0, 4.0, 1.0};
  const auto r = polynomial_roots(c);
  REQUIRE(r.size() == 3);
  for (Complex e : {Complex(0.0), Complex(-1.0), Complex(-3.0)}) CHECK(contains(r, e, 1e-12));
  const auto crit = critical_points(kFig1);
  REQUIRE(crit.size() == 2);
  CHECK(contains(crit, -2.0, 1e-12));
  CHECK(contains(crit, -2.0 / 3.0, 1e-12));
}

TEST_CASE("escape time and Green potential") {
  const Polynomial sq({0.0, 0.0, 1.0});
  CHECK(escape_time(sq, 3.0, 100).escaped);
  CHECK_FALSE(escape_time(sq, Complex(0.5, 0.5), 100).escaped);
  CHECK(green_potential(sq, Complex(0.3, 0.1)) == 0.0);
  for (double r : {2.0, 3.7, 10.0})
    CHECK(std::abs(green_potential(sq, std::polar(r, 1.1)) - std::log(r)) < 1e-12);

  // High-precision oracle for the cubic at several points.
  for (Complex z : {Complex(10.0, 0.0), Complex(-4.0, 3.0), Complex(0.5, 2.5)}) {
    const double exact = mp_green(kFig1.coeffs(), z, 9);
    CHECK(std::abs(green_potential(kFig1, z) - exact) < 1e-12 * std::max(1.0, exact));
  }
  // Functional equation G(P z) = d G(z).
  const Complex z(0.4, 1.9);
  CHECK(green_potential(kFig1, kFig1(z)) == doctest::Approx(3.0 * green_potential(kFig1, z)).epsilon(1e-12));
}

TEST_CASE("fixed points of the cubic and their multipliers") {
  const auto cycles = find_cycles(kFig1, 1).cycles;
  REQUIRE(cycles.size() == 3);
  // P(z) - z = z (z + 1)(z + 3); multipliers from P' = (3z + 2)(z + 2).
  const std::vector<std::pair<Complex, Complex>> expected{{0.0, 4.0}, {-1.0, -1.0}, {-3.0, 7.0}};
  for (const auto& [z, lambda] : expected) {
    const auto it = std::find_if(cycles.begin(), cycles.end(),
                                 [&](const Cycle& c) { return std::abs(c.points[0] - z) < 1e-9; });
    REQUIRE(it != cycles.end());
    CHECK(std::abs(kFig1(it->points[0]) - it->points[0]) < 1e-9);
    CHECK(std::abs(it->multiplier - lambda) < 1e-9);
  }
}

TEST_CASE("cycles of the basilica") {
  const Polynomial Q({-1.0, 0.0, 1.0});
  const auto cycles = find_cycles(Q, 2).cycles;
  int fixed = 0, two = 0;
  for (const auto& c : cycles) {
    if (c.period == 1) {
      ++fixed;
      // (1 +- sqrt 5) / 2 with multiplier 1 +- sqrt 5.
      CHECK(std::abs(c.multiplier - 2.0 * c.points[0]) < 1e-9);
      CHECK(std::abs(c.points[0] * c.points[0] - c.points[0] - 1.0) < 1e-9);
      CHECK(c.kind == CycleKind::Repelling);
    } else {
      ++two;
      CHECK(contains(c.points, 0.0, 1e-9));
      CHECK(contains(c.points, -1.0, 1e-9));
      CHECK(std::abs(c.multiplier) < 1e-9);
      CHECK(c.kind == CycleKind::Attracting);
    }
  }
  CHECK(fixed == 2);
  CHECK(two == 1);
}

TEST_CASE("multiplier classification") {
  CHECK(classify_multiplier(0.5) == CycleKind::Attracting);
  CHECK(classify_multiplier(2.0) == CycleKind::Repelling);
  CHECK(classify_multiplier(-1.0) == CycleKind::Parabolic);
  CHECK(classify_multiplier(std::polar(1.0, 2.0 * M_PI / 5.0)) == CycleKind::Parabolic);
  CHECK(classify_multiplier(std::polar(1.0, 2.0 * M_PI * (std::sqrt(5.0) - 1.0) / 2.0)) ==
        CycleKind::NeutralIrrational);
}
