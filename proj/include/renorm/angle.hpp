#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace renorm {

// Exact rational angle p/q in R/Z, measured in turns.
class Angle {
 public:
  Angle() = default;
  Angle(std::int64_t num, std::int64_t den);

  static Angle parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double turns() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  // k * theta mod 1, exact.
  Angle times(std::int64_t k) const;
  // d^n * theta mod 1, exact (modular exponentiation on the numerator).
  Angle times_power(std::int64_t d, std::int64_t n) const;

  std::string str() const;

  friend bool operator==(const Angle&, const Angle&) = default;
  friend std::strong_ordering operator<=>(const Angle& a, const Angle& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct TupleOrbit {
  int preperiod = 0;
  int period = 0;
  std::vector<Angle> orbit;
};

TupleOrbit tuple_orbit(const Angle& theta, int d);

// Length of the counterclockwise arc from a to b, in (0, 1]; a full turn when a == b.
double ccw_length(double from, double to) noexcept;

// True when x lies in the open counterclockwise arc (from, to).
bool in_open_arc(double x, double from, double to) noexcept;

// Reduce to [0, 1).
double frac_turns(double x) noexcept;

}  // namespace renorm
