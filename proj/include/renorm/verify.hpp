#pragma once

#include <string>
#include <vector>

#include "renorm/cuts.hpp"
#include "renorm/poly.hpp"

namespace renorm {

struct RegionCycles {
  std::vector<Cycle> inside;     // every orbit point outside all wedges
  std::vector<Cycle> ambiguous;  // some orbit point within 1e-6 of a nondegenerate cut
  std::vector<Cycle> excluded;   // some orbit point inside a wedge
};

// Cycles of P with exact period <= max_period, sorted by their wedge membership.
RegionCycles cycles_in_region(const Polynomial& P, const CutFamily& Z, int max_period);

// Distance from z to the closest nondegenerate cut of Z (rays and root).
double distance_to_cuts(const CutFamily& Z, Complex z);

struct PeriodCensus {
  int period = 0;
  int q_cycles = 0;
  int p_cycles = 0;    // inside the avoiding set
  int p_ambiguous = 0;
  bool match = false;  // q_cycles within [p_cycles, p_cycles + p_ambiguous]
};

struct MultiplierMatch {
  int period = 0;
  Complex p_point{}, q_point{};
  Complex p_multiplier{}, q_multiplier{};
  bool has_p = false, has_q = false;
  bool matched() const noexcept { return has_p && has_q; }
};

struct ConjugacyReport {
  int d_c = 0;
  int max_period = 0;
  std::vector<PeriodCensus> census;
  std::vector<MultiplierMatch> non_repelling;
  bool counts_match = false;
  bool multipliers_match = false;
  bool ambiguous = false;  // some P-cycle could not be assigned
  bool pass = false;
};

// Compares P restricted to the avoiding set of Z with Q by cycle counts per period
// and by multipliers of non-repelling cycles (tolerance 1e-6). Throws
// DegreeMismatch when deg Q differs from the topological degree d_c of Z.
ConjugacyReport conjugacy_report(const Polynomial& P, const CutFamily& Z, const Polynomial& Q, int max_period);

std::string census_csv(const ConjugacyReport& r);
std::string multipliers_csv(const ConjugacyReport& r);
std::string report_text(const ConjugacyReport& r);

}  // namespace renorm
