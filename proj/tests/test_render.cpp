#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "renorm/error.hpp"
#include "renorm/pipeline.hpp"
#include "renorm/render.hpp"
#include "renorm/scene.hpp"

using namespace renorm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("renorm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string schema_error(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("PPM output is byte exact") {
  Image img(3, 2, {1, 2, 3});
  img.set(0, 2, {255, 0, 10});
  img.set(5, 5, {9, 9, 9});  // ignored
  std::ostringstream os;
  img.write_ppm(os);
  const std::string bytes = os.str();
  const std::string header = "P6\n3 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 18);
  CHECK(bytes.substr(0, header.size()) == header);
  // Row-major, top row first: pixel (0, 2) is the third triple.
  CHECK(static_cast<unsigned char>(bytes[header.size() + 6]) == 255);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 8]) == 10);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 9]) == 1);
  std::istringstream is(bytes);
  const Image back = read_ppm(is);
  CHECK(back.bytes() == img.bytes());
  std::istringstream bad("P3\n1 1\n255\n");
  CHECK_THROWS_AS(read_ppm(bad), Error);
}

TEST_CASE("segments are rasterized in plane coordinates") {
  const GridSpec g{{0.0, 0.0}, 2.0, 20};
  Image img(20, 20);
  draw_segment(img, g, Complex(-0.95, 0.95), Complex(0.95, -0.95), {0, 0, 0});
  // Diagonal from the top-left pixel to the bottom-right pixel.
  CHECK(img.at(0, 0) == Rgb{0, 0, 0});
  CHECK(img.at(19, 19) == Rgb{0, 0, 0});
  CHECK(img.at(10, 10) == Rgb{0, 0, 0});
  CHECK(img.at(0, 19) == Rgb{255, 255, 255});
  Image clip(20, 20);
  draw_segment(clip, g, Complex(-5.0, 0.05), Complex(5.0, 0.05), {0, 0, 0});
  CHECK(clip.at(9, 0) == Rgb{0, 0, 0});
  CHECK(clip.at(9, 19) == Rgb{0, 0, 0});
  CHECK(clip.at(10, 5) == Rgb{255, 255, 255});
}

TEST_CASE("layers use the palette") {
  const GridSpec g{{0.0, 0.0}, 2.0, 16};
  Mask K(g), A(g), W(g);
  K.set(0, 0, true);
  K.set(0, 1, true);
  A.set(0, 1, true);
  W.set(0, 2, true);
  std::vector<int> esc(16 * 16, 0);
  esc[3] = 1;
  esc[4] = 500;
  Layers L;
  L.filled = &K;
  L.avoiding = &A;
  L.wedges = &W;
  L.escape = &esc;
  L.max_iter = 512;
  const Colors c = palette_colors(Palette::Standard);
  const Image img = compose(g, L, c);
  CHECK(img.at(0, 0) == Rgb{160, 160, 160});
  CHECK(img.at(0, 1) == Rgb{64, 64, 64});
  CHECK(img.at(0, 2) == Rgb{200, 200, 255});
  CHECK(img.at(0, 5) == c.exterior_far);
  // Slower escape is darker.
  CHECK(img.at(0, 4)[0] < img.at(0, 3)[0]);
  CHECK(c.ray == Rgb{0, 0, 0});
  CHECK(c.carrot == Rgb{255, 0, 0});
}

TEST_CASE("CSV helpers") {
  CHECK(csv_number(0.5) == "0.5");
  CHECK(std::stod(csv_number(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK(polylines_csv({{"a", {Complex(1.0, -2.0)}}}) == "curve,index,re,im\na,0,1,-2\n");
}

TEST_CASE("scene parsing") {
  const std::string text = R"({
    "coeffs": [[0,0],[4,0],[4,0],[1,0]],
    "cuts": [{"theta_r": "1/3", "theta_l": "4/6"}, {"theta_r": "0", "theta_l": "0"}],
    "grid": {"center": [-1.5, 0], "width": 3.8, "resolution": 64},
    "max_iter": 300, "Q": [[0,0],[-1,0],[1,0]], "outputs": {"prefix": "fig"},
    "palette": "grey", "seed": 42})";
  const Scene s = parse_scene(text);
  CHECK(s.coeffs.size() == 4);
  REQUIRE(s.cuts.size() == 2);
  CHECK(s.cuts[0].theta_l == Angle(2, 3));
  CHECK(s.grid.resolution == 64);
  CHECK(s.max_iter == 300);
  CHECK(s.q_coeffs.has_value());
  CHECK(s.output_prefix == "fig");
  CHECK(s.palette == Palette::Grey);
  CHECK(s.seed == 42);
  CHECK(s.carrot_rho() == doctest::Approx(std::exp(-0.5)));
  const Scene again = parse_scene(scene_to_json(s));
  CHECK(scene_to_json(again) == scene_to_json(s));
}

TEST_CASE("schema violations name the field") {
  CHECK(schema_error(R"({"cuts": []})").rfind("SchemaViolation: coeffs:", 0) == 0);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[2,0]]})").find("coeffs[2]: polynomial must be monic") !=
        std::string::npos);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[1,0]], "cuts": [{"theta_r": "1/3", "theta_l": 0.5}]})")
            .find("cuts[0].theta_l") != std::string::npos);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[1,0]], "cuts": [{"theta_r": "1/x", "theta_l": "1/2"}]})")
            .find("cuts[0].theta_r") != std::string::npos);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[1,0]], "grid": {"width": -1}})").find("grid.width") !=
        std::string::npos);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[1,0]], "grid": {"resolution": 4}})").find("grid") !=
        std::string::npos);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[1,0]], "colour": 1})").find("colour: unknown field") !=
        std::string::npos);
  CHECK(schema_error(R"({"coeffs": [[0,0],[0,0],[1,0]], "rho": 2})").find("rho") != std::string::npos);
  CHECK(schema_error("{not json").find("(document)") != std::string::npos);
}

TEST_CASE("julia subcommand draws the unit disk for z^2") {
  Scene s;
  s.coeffs = {0.0, 0.0, 1.0};
  s.grid = GridSpec{{0.0, 0.0}, 3.0, 96};
  s.output_prefix = "sq";
  const auto dir = scratch_dir("julia");
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.threads = 1;
  std::ostringstream log;
  CHECK(run_subcommand("julia", s, opts, log) == kExitPass);
  std::ifstream in(dir / "sq_julia.ppm", std::ios::binary);
  const Image img = read_ppm(in);
  std::size_t wrong = 0;
  for (int i = 0; i < 96; ++i)
    for (int j = 0; j < 96; ++j) {
      const bool disk = std::abs(s.grid.pixel_center(i, j)) <= 1.0;
      wrong += disk != (img.at(i, j) == Rgb{160, 160, 160});
    }
  CHECK(wrong < 96 * 96 / 100);

  // Same bytes with more workers.
  const auto dir2 = scratch_dir("julia2");
  opts.out_dir = dir2.string();
  opts.threads = 3;
  CHECK(run_subcommand("julia", s, opts, log) == kExitPass);
  CHECK(slurp(dir / "sq_julia.ppm") == slurp(dir2 / "sq_julia.ppm"));
  CHECK(slurp(dir / "sq_julia.csv") == slurp(dir2 / "sq_julia.csv"));
  CHECK_THROWS_AS(run_subcommand("nope", s, opts, log), Error);
}

TEST_CASE("verify subcommand on the figure scene") {
  Scene s = figure1_scene();
  const auto dir = scratch_dir("verify");
  RunOptions opts;
  opts.out_dir = dir.string();
  std::ostringstream log;
  CHECK(run_subcommand("verify", s, opts, log) == kExitPass);
  CHECK(slurp(dir / "figure1_census.csv") == "period,q_cycles,p_cycles,p_ambiguous,match\n1,2,2,0,1\n2,0,0,0,1\n3,2,2,0,1\n");
  s.q_coeffs = std::vector<Complex>{0.0, 0.0, 1.0};
  CHECK(run_subcommand("verify", s, opts, log) == kExitCheckFailed);
  s.q_coeffs.reset();
  CHECK_THROWS_AS(run_subcommand("verify", s, opts, log), Error);
}

TEST_CASE("overrides") {
  RunOptions opts;
  opts.resolution = 128;
  opts.max_iter = 99;
  const Scene s = apply_overrides(figure1_scene(), opts);
  CHECK(s.grid.resolution == 128);
  CHECK(s.max_iter == 99);
  opts.supersample = 3;
  CHECK_THROWS_AS(apply_overrides(figure1_scene(), opts), Error);
}
