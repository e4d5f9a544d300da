#include "renorm/angle.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "renorm/error.hpp"

namespace renorm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BranchJump: return "BranchJump";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NoColanding: return "NoColanding";
    case ErrorCode::RayNotConverged: return "RayNotConverged";
    case ErrorCode::OutsideLinearizationDomain: return "OutsideLinearizationDomain";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::WrongPullback: return "WrongPullback";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::CarrotOverlap: return "CarrotOverlap";
    case ErrorCode::ContinuityGap: return "ContinuityGap";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
  }
  return "Unknown";
}

namespace {

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m);
}

std::int64_t powmod(std::int64_t base, std::int64_t exp, std::int64_t m) {
  std::int64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

Angle::Angle(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw Error(ErrorCode::InvalidInput, "angle denominator must be positive");
  num %= den;
  if (num < 0) num += den;
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Angle Angle::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw Error(ErrorCode::InvalidInput, "malformed angle '" + std::string(text) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Angle(parse_int(text), 1);
  return Angle(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Angle Angle::times(std::int64_t k) const {
  std::int64_t m = k % den_;
  if (m < 0) m += den_;
  return Angle(mulmod(num_, m, den_), den_);
}

Angle Angle::times_power(std::int64_t d, std::int64_t n) const {
  if (n < 0) throw Error(ErrorCode::InvalidInput, "negative exponent");
  return Angle(mulmod(num_, powmod(d, n, den_), den_), den_);
}

std::string Angle::str() const {
  if (num_ == 0) return "0";
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

TupleOrbit tuple_orbit(const Angle& theta, int d) {
  if (d < 2) throw Error(ErrorCode::InvalidInput, "tupling degree must be >= 2");
  TupleOrbit out;
  std::map<Angle, int> seen;
  Angle cur = theta;
  while (true) {
    auto it = seen.find(cur);
    if (it != seen.end()) {
      out.preperiod = it->second;
      out.period = static_cast<int>(out.orbit.size()) - it->second;
      return out;
    }
    seen.emplace(cur, static_cast<int>(out.orbit.size()));
    out.orbit.push_back(cur);
    cur = cur.times(d);
  }
}

double frac_turns(double x) noexcept {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

double ccw_length(double from, double to) noexcept {
  double len = frac_turns(to - from);
  return len == 0.0 ? 1.0 : len;
}

bool in_open_arc(double x, double from, double to) noexcept {
  const double off = frac_turns(x - from);
  return off > 0.0 && off < ccw_length(from, to);
}

}  // namespace renorm
