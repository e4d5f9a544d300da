#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "renorm/carrot.hpp"
#include "renorm/cuts.hpp"
#include "renorm/mask.hpp"

namespace renorm {

// d - sum of d |I| over nondegenerate cuts with a critical root. Throws when some
// d |I| is not an integer or when the result is below 2.
int degree_formula(const CutFamily& Z);

// Interior extension on one critical carrot: boundary-normalized coordinates of the
// carrot are carried to the same coordinates of the image carrot at rho^d, with
// the sides matched through P and the arcs matched proportionally in angle.
class CarrotPatch {
 public:
  CarrotPatch(const Polynomial& P, const Carrot& source, const Carrot& image);

  const Carrot& source() const noexcept { return *source_; }
  const Carrot& image() const noexcept { return *image_; }
  const CarrotChart& source_chart() const noexcept { return src_; }
  const CarrotChart& image_chart() const noexcept { return img_; }

  // Image of chart coordinates (s, v).
  Complex map_coords(double s, double v) const noexcept;
  // Image of a point of the carrot; the root goes to the image root.
  Complex map(Complex z) const;

 private:
  Complex side_image(double v, bool left) const noexcept;

  std::shared_ptr<const Carrot> source_, image_;
  CarrotChart src_, img_;
  std::vector<Complex> root_taylor_;  // P(a + h) - P(a) = sum_{k >= 1} c_k h^k
  Complex offset_{};                  // P(a) - image root
  Complex corner_r_{}, corner_l_{};
};

struct SurgeryOptions {
  CarrotOptions carrot;
  int continuity_samples = 1000;
  double continuity_tol = 1e-6;
  int threads = 0;
};

// f = P^c extended by the exterior cap. Immutable after build.
class SurgeryMap {
 public:
  static SurgeryMap build(const CutFamily& Z, double rho, const SurgeryOptions& opts = {});

  const Polynomial& poly() const noexcept { return Z_->poly(); }
  const CutFamily& family() const noexcept { return *Z_; }
  int d() const noexcept { return poly().degree(); }
  int d_c() const noexcept { return d_c_; }
  double rho() const noexcept { return rho_; }
  double G0() const noexcept { return G0_; }
  double G1() const noexcept { return G1_; }
  int T_cr() const noexcept { return static_cast<int>(patches_.size()); }
  int T_0() const noexcept { return 1; }

  const std::vector<Carrot>& carrots() const noexcept { return carrots_; }
  const std::vector<CarrotPatch>& patches() const noexcept { return patches_; }
  double continuity_gap() const noexcept { return continuity_gap_; }

  // Index of the critical patch whose carrot contains z, or -1.
  int patch_at(Complex z) const noexcept;

  // Boundary angle map on E(rho): a lift with H(theta + 1) = H(theta) + d_c.
  double boundary_angle(double theta) const noexcept;
  double cap_potential(double G) const noexcept;
  double cap_angle(double G, double theta) const noexcept;
  // Basin point with potential G and external angle theta (turns).
  Complex basin_point(double G, double theta) const;

  // Critical patch whose arc on E(rho) contains theta, with the arc parameter s.
  int arc_at(double theta, double& s) const noexcept;

  Complex operator()(Complex z) const;

 private:
  std::shared_ptr<const CutFamily> Z_;
  double rho_ = 0.0, G0_ = 0.0, G1_ = 0.0;
  int d_c_ = 0;
  std::vector<Carrot> carrots_;
  std::vector<CarrotPatch> patches_;
  struct CritArc {
    double start, span, image_start, image_span;
    int patch;
  };
  std::vector<CritArc> arcs_;  // sorted by offset from base_
  double base_ = 0.0;
  double continuity_gap_ = 0.0;
};

struct DegreeReport {
  int formula = 0;
  std::vector<int> winding;          // around interior test points
  std::vector<int> preimage_counts;  // of generic points of E(rho^d)
  bool consistent = false;
};

// Cross-checks d_c by the winding number of f(E(rho)) and by counting preimages
// of `points` generic points of E(rho^d). Throws DegreeMismatch on disagreement.
DegreeReport degree_dc(const SurgeryMap& S, int points = 20, int samples = 4096);

struct VisitReport {
  std::uint64_t seed = 0;
  int n_seeds = 0;
  int max_iter = 0;
  int max_cr_visits = 0;
  int max_visits = 0;  // A = A_0 + A_cr
  std::vector<Complex> offending;  // seeds exceeding T_cr
};

// Seeds drawn uniformly from the grid window with mt19937_64(seed).
VisitReport visit_count_experiment(const SurgeryMap& S, const GridSpec& window, int n_seeds, int max_iter,
                                   std::uint64_t seed = 0x5eed5eedULL, int threads = 0);

// Visits of a single orbit to A_cr and to A.
std::pair<int, int> visit_counts(const SurgeryMap& S, Complex z, int max_iter);

// Pixel set iff the orbit under f stays bounded for max_iter steps.
Mask nonescaping_mask(const SurgeryMap& S, const GridSpec& grid, const MaskOptions& opts = {});

struct DilatationReport {
  double max_ratio = 1.0;
  int flagged = 0;      // samples above 100
  int reversing = 0;    // orientation-reversing samples
  int samples = 0;
};

DilatationReport dilatation(const SurgeryMap& S, int grid = 64);

}  // namespace renorm
