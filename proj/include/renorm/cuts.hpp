#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "renorm/angle.hpp"
#include "renorm/boettcher.hpp"
#include "renorm/geometry.hpp"
#include "renorm/poly.hpp"

namespace renorm {

struct CutSpec {
  Angle theta_r, theta_l;
};

struct Cut {
  Angle theta_r, theta_l;
  Complex root{};
  bool degenerate = false;
  RayPolyline ray_r, ray_l;

  // |I| = counterclockwise length from theta_r to theta_l; zero when degenerate.
  double arc_length() const noexcept;
};

struct CutOptions {
  double g_start = 20.0;
  double g_end = 1e-12;
  int substeps = 8;
};

Cut build_cut(const BoettcherSolver& B, const Angle& theta_r, const Angle& theta_l,
              const CutOptions& opts = {});
Cut build_cut(const Polynomial& P, const Angle& theta_r, const Angle& theta_l,
              const CutOptions& opts = {});

// The wedge is the component of the plane minus the cut whose external angles lie
// in the open counterclockwise arc (theta_r, theta_l), truncated at potential G.
struct Wedge {
  Angle theta_r, theta_l;
  bool degenerate = true;
  double truncation = 0.0;
  Polyline boundary;  // root, R up to the equipotential, arc, L back down
  PolygonIndex index;

  bool contains(Complex z) const noexcept { return !degenerate && index.contains(z); }
};

Wedge build_wedge(const BoettcherSolver& B, const Cut& cut, double truncation,
                  int arc_samples = 256, int substeps = 8);

bool wedge_contains(const Wedge& W, Complex z) noexcept;

enum class RootClass { OutwardRepelling, OutwardParabolic, Unresolved };
const char* to_string(RootClass c) noexcept;

struct CutFlags {
  bool periodic = false;
  bool preperiodic = false;
  bool critical_root = false;
  bool fictitious = false;
};

struct RootClassification {
  RootClass kind = RootClass::Unresolved;
  Complex terminal_point{};
  int terminal_period = 0;
  Complex multiplier{};
  std::string detail;
};

class CutFamily {
 public:
  static CutFamily build(const Polynomial& P, const std::vector<CutSpec>& specs, double truncation,
                         const CutOptions& opts = {}, int threads = 0);

  const Polynomial& poly() const noexcept { return solver_->poly(); }
  const BoettcherSolver& solver() const noexcept { return *solver_; }
  const std::vector<Cut>& cuts() const noexcept { return cuts_; }
  const std::vector<Wedge>& wedges() const noexcept { return wedges_; }
  // Index of the image cut, or -1 when the family is not closed at i.
  const std::vector<int>& forward_map() const noexcept { return forward_; }
  const std::vector<CutFlags>& flags() const noexcept { return flags_; }
  const std::vector<RootClassification>& classification() const noexcept { return classes_; }
  double truncation() const noexcept { return truncation_; }
  bool empty() const noexcept { return cuts_.empty(); }

  bool in_any_wedge(Complex z) const noexcept;
  // Cuts whose orbit under the forward map returns to themselves.
  std::vector<int> orbit(int i) const;

 private:
  std::shared_ptr<const BoettcherSolver> solver_;
  std::vector<Cut> cuts_;
  std::vector<Wedge> wedges_;
  std::vector<int> forward_;
  std::vector<CutFlags> flags_;
  std::vector<RootClassification> classes_;
  double truncation_ = 0.0;
};

RootClassification classify_root(const Polynomial& P, const CutFamily& Z, const Cut& cut);

struct CheckRow {
  std::string check;
  int cut = -1;
  int other = -1;
  std::string detail;
  bool pass = true;
};

struct AdmissibilityReport {
  bool admissible = true;
  bool invariant = true;
  std::vector<std::pair<int, int>> offending;
  std::vector<CheckRow> rows;
};

AdmissibilityReport check_admissible(const Polynomial& P, const CutFamily& Z, double G0);

struct LegalityReport {
  bool legal = true;
  std::vector<int> periodic_nondegenerate;  // must be empty
  std::vector<int> fictitious;
  std::vector<CheckRow> rows;
};

LegalityReport check_legal(const Polynomial& P, const CutFamily& Z);

std::string rows_to_csv(const std::vector<CheckRow>& rows);

}  // namespace renorm
