#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "renorm/angle.hpp"
#include "renorm/cuts.hpp"
#include "renorm/mask.hpp"
#include "renorm/poly.hpp"

namespace renorm {

enum class Palette { Standard, Grey };

struct Scene {
  std::vector<Complex> coeffs;  // constant term first, monic
  std::vector<CutSpec> cuts;
  double truncation = 0.5;      // wedge truncation potential
  GridSpec grid;
  int max_iter = 512;
  double rho = 0.0;             // 0 means exp(-truncation)
  std::optional<std::vector<Complex>> q_coeffs;
  int max_period = 3;
  std::vector<Angle> rays;      // extra rays for the ray subcommand
  std::string output_prefix = "scene";
  Palette palette = Palette::Standard;
  std::uint64_t seed = 0x5eed5eedULL;

  Polynomial poly() const { return Polynomial(coeffs); }
  double carrot_rho() const;
};

// Parses and validates a JSON scene; SchemaViolation messages start with the
// offending field path, e.g. "cuts[1].theta_l".
Scene parse_scene(const std::string& json_text);
Scene load_scene(const std::string& path);
std::string scene_to_json(const Scene& s);

// z(z+2)^2 with cuts (1/3, 2/3) and (0, 0), window centred at -1.5 of width 3.8,
// candidate Q = z^2 - z.
Scene figure1_scene();

}  // namespace renorm
