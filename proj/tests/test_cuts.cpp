#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "renorm/cuts.hpp"
#include "renorm/error.hpp"

using namespace renorm;

namespace {

const Polynomial kFig1({0.0, 4.0, 4.0, 1.0});

const CutFamily& fig1() {
  static const CutFamily Z =
      CutFamily::build(kFig1, {{Angle(1, 3), Angle(2, 3)}, {Angle(0, 1), Angle(0, 1)}}, 0.5);
  return Z;
}

bool any_row(const std::vector<CheckRow>& rows, const std::string& check, const std::string& needle) {
  return std::any_of(rows.begin(), rows.end(), [&](const CheckRow& r) {
    return r.check == check && r.pass && r.detail.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("cut roots and degeneracy") {
  const auto& Z = fig1();
  REQUIRE(Z.cuts().size() == 2);
  CHECK(std::abs(Z.cuts()[0].root + 2.0) < 1e-6);
  CHECK(std::abs(Z.cuts()[1].root) < 1e-6);
  CHECK_FALSE(Z.cuts()[0].degenerate);
  CHECK(Z.cuts()[1].degenerate);
  CHECK(Z.cuts()[0].arc_length() == doctest::Approx(1.0 / 3));
  CHECK(Z.cuts()[1].arc_length() == 0.0);
}

TEST_CASE("forward map and flags") {
  const auto& Z = fig1();
  // Tripling sends 1/3 and 2/3 to 0, and 0 to itself.
  CHECK(Z.forward_map() == std::vector<int>{1, 1});
  CHECK(Z.flags()[0].critical_root);
  CHECK_FALSE(Z.flags()[0].periodic);
  CHECK(Z.flags()[1].periodic);
  CHECK_FALSE(Z.flags()[1].critical_root);
  CHECK(Z.orbit(1) == std::vector<int>{1});
  const auto& cls = Z.classification()[1];
  CHECK(cls.kind == RootClass::OutwardRepelling);
  CHECK(std::abs(cls.multiplier - 4.0) < 1e-9);
}

TEST_CASE("wedge membership") {
  const auto& Z = fig1();
  // Fixed points: -3 lies on the far side of the cut at -2, 0 and -1 do not.
  CHECK(Z.in_any_wedge(-3.0));
  CHECK_FALSE(Z.in_any_wedge(-1.0));
  CHECK_FALSE(Z.in_any_wedge(Complex(0.5, 0.0)));
  CHECK_FALSE(Z.in_any_wedge(-2.0));
  CHECK(Z.wedges()[1].degenerate);
  CHECK_FALSE(Z.wedges()[1].contains(-3.0));
  // Beyond the truncation potential the wedge ends.
  CHECK_FALSE(Z.in_any_wedge(-8.5));
}

TEST_CASE("the figure family is admissible and legal") {
  const auto& Z = fig1();
  const auto adm = check_admissible(kFig1, Z, 0.5);
  CHECK(adm.admissible);
  CHECK(adm.invariant);
  const auto leg = check_legal(kFig1, Z);
  CHECK(leg.legal);
  CHECK(leg.periodic_nondegenerate.empty());
  CHECK(leg.fictitious.empty());
  CHECK(any_row(leg.rows, "critical-root", "-2+0i critical"));
  CHECK(any_row(leg.rows, "terminal-cycle", "repelling"));
  CHECK(any_row(leg.rows, "precritical", "rooted at 0+0i"));
  const auto csv = rows_to_csv(leg.rows);
  CHECK(csv.rfind("check,cut,other,pass,detail\n", 0) == 0);
}

TEST_CASE("a family missing the image cut is not invariant") {
  const auto Z = CutFamily::build(kFig1, {{Angle(1, 3), Angle(2, 3)}}, 0.5);
  CHECK(Z.forward_map()[0] == -1);
  const auto adm = check_admissible(kFig1, Z, 0.5);
  CHECK_FALSE(adm.invariant);
  CHECK_FALSE(adm.admissible);
}

TEST_CASE("a periodic nondegenerate cut is not legal") {
  // For z^2 - 1 the rays 1/3 and 2/3 land together at the alpha fixed point.
  const Polynomial Q({-1.0, 0.0, 1.0});
  // Doubling swaps the two orientations of this cut.
  const auto Z = CutFamily::build(Q, {{Angle(1, 3), Angle(2, 3)}, {Angle(2, 3), Angle(1, 3)}}, 0.5);
  CHECK(std::abs(Z.cuts()[0].root - (1.0 - std::sqrt(5.0)) / 2.0) < 1e-6);
  CHECK(Z.forward_map() == std::vector<int>{1, 0});
  const auto leg = check_legal(Q, Z);
  CHECK_FALSE(leg.legal);
  CHECK(leg.periodic_nondegenerate == std::vector<int>{0, 1});
}

TEST_CASE("rays that do not co-land are rejected") {
  CHECK_THROWS_AS(CutFamily::build(kFig1, {{Angle(1, 3), Angle(1, 2)}}, 0.5), Error);
}
