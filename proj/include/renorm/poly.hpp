#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace renorm {

using Complex = std::complex<double>;

// Monic complex polynomial, coefficients stored constant term first.
class Polynomial {
 public:
  explicit Polynomial(std::vector<Complex> coeffs);

  int degree() const noexcept { return degree_; }
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  double escape_radius() const noexcept { return escape_radius_; }

  Complex operator()(Complex z) const noexcept;
  Complex derivative(Complex z) const noexcept;

  struct Jet {
    Complex value, d1, d2;
  };
  // Value and derivatives; near a critical point the expansion about that point is
  // used, which keeps full relative precision where monomial Horner cancels.
  Jet jet(Complex z) const noexcept;

  // Taylor coefficients of P about z0: P(z0 + h) = sum_k out[k] h^k.
  std::vector<Complex> taylor_at(Complex z0) const;

  // P' as a coefficient list (not monic).
  std::vector<Complex> derivative_coeffs() const;

  std::string str() const;

 private:
  std::vector<Complex> coeffs_;
  int degree_;
  double escape_radius_;
  struct LocalExpansion {
    Complex center;
    double radius;
    std::vector<Complex> taylor;
  };
  std::vector<LocalExpansion> local_;
};

// Value and first two derivatives of P^n at z.
struct IterateJet {
  Complex value, d1, d2;
};
IterateJet iterate_jet(const Polynomial& P, Complex z, int n) noexcept;

// First `order`+1 Taylor coefficients of P^n about z0.
std::vector<Complex> iterate_series(const Polynomial& P, Complex z0, int n, int order);

Complex iterate(const Polynomial& P, Complex z, int n) noexcept;

struct EscapeResult {
  bool escaped = false;
  int steps = 0;
  Complex final{};
};
EscapeResult escape_time(const Polynomial& P, Complex z, int max_iter);

// Green potential G(z) = lim log|P^n z| / d^n; zero when the orbit stays bounded
// for the whole budget.
double green_potential(const Polynomial& P, Complex z, int max_iter = 4096);

// All roots of a polynomial given constant-first coefficients (leading may be non-unit).
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

// Simultaneous Aberth iteration for a degree-n function known through its Newton
// ratio f/f'. `ratio` must return f(z)/f'(z).
std::vector<Complex> aberth(int n, const std::function<Complex(Complex)>& ratio, double radius,
                            int max_iter = 2000);

std::vector<Complex> critical_points(const Polynomial& P);

enum class CycleKind { Attracting, Repelling, Parabolic, NeutralIrrational };
const char* to_string(CycleKind kind) noexcept;

CycleKind classify_multiplier(Complex lambda) noexcept;

struct Cycle {
  std::vector<Complex> points;
  int period = 0;
  Complex multiplier{};
  CycleKind kind = CycleKind::Repelling;
};

struct SeedGrid {
  Complex center{0.0, 0.0};
  double width = 0.0;  // 0 means: 2.2 times the escape radius
  int n = 64;
};

struct CycleSearch {
  std::vector<Cycle> cycles;
  std::vector<Complex> failed_seeds;
};

// Every cycle whose exact period divides some n <= max_period.
CycleSearch find_cycles(const Polynomial& P, int max_period, const SeedGrid& seeds = {});

Complex cycle_multiplier(const Polynomial& P, std::span<const Complex> orbit) noexcept;

}  // namespace renorm
