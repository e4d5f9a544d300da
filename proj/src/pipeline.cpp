#include "renorm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "renorm/boettcher.hpp"
#include "renorm/carrot.hpp"
#include "renorm/cuts.hpp"
#include "renorm/error.hpp"
#include "renorm/estimators.hpp"
#include "renorm/render.hpp"
#include "renorm/surgery.hpp"
#include "renorm/verify.hpp"

namespace renorm {

namespace {

constexpr double kRayStart = 20.0;
constexpr double kRayEnd = 1e-12;

struct Context {
  const Scene& scene;
  const RunOptions& opts;
  std::ostream& log;
  std::ostringstream report;  // deterministic summary written to disk

  std::string path(const std::string& suffix) const {
    return (std::filesystem::path(opts.out_dir) / (scene.output_prefix + suffix)).string();
  }
  void emit(const std::string& line) {
    log << line << '\n';
    report << line << '\n';
  }
  MaskOptions mask_options(int max_iter) const { return {max_iter, opts.threads, opts.supersample}; }
};

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

std::string point(Complex z) { return "(" + fixed(z.real(), 12) + ", " + fixed(z.imag(), 12) + ")"; }

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

CutFamily build_family(const Context& ctx, const Polynomial& P) {
  return CutFamily::build(P, ctx.scene.cuts, ctx.scene.truncation, {}, ctx.opts.threads);
}

std::vector<Polyline> cut_rays(const CutFamily& Z) {
  std::vector<Polyline> out;
  for (const auto& c : Z.cuts()) {
    Polyline r = c.ray_r.points;
    r.push_back(c.root);
    out.push_back(std::move(r));
    if (!c.degenerate) {
      Polyline l = c.ray_l.points;
      l.push_back(c.root);
      out.push_back(std::move(l));
    }
  }
  return out;
}

// Rays of the scene (or of its cuts) with their landing points.
bool stage_rays(Context& ctx, const BoettcherSolver& B) {
  std::vector<Angle> angles = ctx.scene.rays;
  if (angles.empty())
    for (const auto& c : ctx.scene.cuts) {
      angles.push_back(c.theta_r);
      if (!(c.theta_l == c.theta_r)) angles.push_back(c.theta_l);
    }
  std::vector<std::pair<std::string, Polyline>> curves;
  std::ostringstream landings;
  landings << "angle,re,im,converged\n";
  bool ok = true;
  for (const auto& a : angles) {
    const auto ray = trace_ray(B, a, kRayStart, kRayEnd);
    curves.emplace_back(a.str(), ray.points);
    Landing land;
    try {
      land = landing_point(ray, B);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotConverged) throw;
    }
    ok = ok && land.converged;
    landings << a.str() << ',' << csv_number(land.point.real()) << ',' << csv_number(land.point.imag()) << ','
             << (land.converged ? 1 : 0) << '\n';
    ctx.emit("ray " + a.str() + (land.converged ? " lands at " + point(land.point) : " did not converge"));
  }
  write_text_file(ctx.path("_rays.csv"), polylines_csv(curves));
  write_text_file(ctx.path("_landings.csv"), landings.str());
  return ok;
}

bool stage_cuts(Context& ctx, const CutFamily& Z) {
  const Polynomial& P = Z.poly();
  const auto adm = check_admissible(P, Z, ctx.scene.truncation);
  const auto leg = check_legal(P, Z);
  auto rows = adm.rows;
  rows.insert(rows.end(), leg.rows.begin(), leg.rows.end());
  write_text_file(ctx.path("_cuts.csv"), rows_to_csv(rows));
  for (const auto& r : rows) ctx.emit("  [" + verdict(r.pass) + "] " + r.check + ": " + r.detail);
  ctx.emit("admissible: " + verdict(adm.admissible) + ", legal: " + verdict(leg.legal));
  return adm.admissible && leg.legal;
}

struct AvoidResult {
  Mask filled, avoiding, wedges;
  std::vector<int> escape;
  bool ok = false;
};

AvoidResult stage_avoid(Context& ctx, const CutFamily& Z) {
  const Polynomial& P = Z.poly();
  const GridSpec& g = ctx.scene.grid;
  const int it = ctx.scene.max_iter;
  AvoidResult r;
  r.filled = compute_mask(P, nullptr, g, ctx.mask_options(it));
  r.avoiding = compute_mask(P, &Z, g, ctx.mask_options(it));
  const Mask doubled = compute_mask(P, &Z, g, ctx.mask_options(2 * it));
  r.wedges = rasterize(g, [&](Complex z) { return Z.in_any_wedge(z); }, ctx.opts.threads, 1);
  r.escape = escape_counts(P, g, it, ctx.opts.threads);

  std::size_t outside_k = 0, changed = 0;
  for (std::size_t k = 0; k < r.avoiding.bits.size(); ++k) {
    outside_k += r.avoiding.bits[k] && !r.filled.bits[k];
    changed += r.avoiding.bits[k] != doubled.bits[k];
  }
  const bool strict = outside_k == 0 && r.avoiding.count() < r.filled.count();
  const auto comps = connected_components(r.avoiding);
  const double change = static_cast<double>(changed) / static_cast<double>(r.avoiding.bits.size());
  r.ok = strict && comps.count == 1 && change < 0.005;

  std::ostringstream csv;
  csv << "metric,value\n"
      << "resolution," << g.resolution << '\n'
      << "max_iter," << it << '\n'
      << "filled_pixels," << r.filled.count() << '\n'
      << "avoiding_pixels," << r.avoiding.count() << '\n'
      << "avoiding_outside_filled," << outside_k << '\n'
      << "components," << comps.count << '\n'
      << "changed_at_double_iter," << changed << '\n'
      << "changed_fraction," << csv_number(change) << '\n'
      << "verdict," << verdict(r.ok) << '\n';
  write_text_file(ctx.path("_avoid.csv"), csv.str());
  {
    std::ofstream raw(ctx.path("_avoid.mask"), std::ios::binary);
    write_raw_mask(raw, r.avoiding);
  }
  ctx.emit("avoiding set: " + std::to_string(r.avoiding.count()) + " of " + std::to_string(r.filled.count()) +
           " filled pixels, " + std::to_string(comps.count) + " component(s), " + fixed(100.0 * change, 4) +
           "% change at doubled iterations: " + verdict(r.ok));
  return r;
}

struct CarrotGeometry {
  int cut = -1;
  bool critical = false;
  double c200 = 0.0, c400 = 0.0, gap = 0.0, k200 = 0.0, k400 = 0.0;
  int scales = 0;
  std::string error;
  bool ok = false;
};

std::vector<std::pair<Complex, Complex>> side_samples(const Polynomial& P, const Polyline& line, int n) {
  std::vector<std::pair<Complex, Complex>> out;
  const std::size_t N = line.size();
  for (int k = 0; k < n; ++k) {
    const Complex x = line[static_cast<std::size_t>(std::llround(static_cast<double>(k) * (N - 1) / (n - 1)))];
    out.emplace_back(x, P(x));
  }
  return out;
}

bool within(double a, double b, double rel) { return std::isfinite(a) && std::isfinite(b) && std::abs(a - b) <= rel * std::abs(b); }

bool stage_carrots(Context& ctx, const CutFamily& Z, std::vector<Carrot>& carrots) {
  const Polynomial& P = Z.poly();
  carrots = build_carrots(Z, ctx.scene.carrot_rho(), {}, ctx.opts.threads);
  std::vector<std::pair<std::string, Polyline>> curves;
  std::ostringstream csv;
  csv << "cut,root_re,root_im,critical,quasi_arc_C,quasi_arc_C_doubled,transversality_gap,scales,weak_qs_kappa,"
         "weak_qs_kappa_doubled,verdict\n";
  bool all = true;
  for (const auto& c : carrots) {
    curves.emplace_back("carrot" + std::to_string(c.cut), c.boundary);
    CarrotGeometry g;
    g.cut = c.cut;
    g.critical = Z.flags()[c.cut].critical_root;
    try {
      const auto pair = side_pair(c);
      g.c200 = quasi_arc_constant(pair, 200);
      g.c400 = quasi_arc_constant(pair, 400);
      const auto t = transversality_gap(c.side_r, c.side_l, c.root, 1e-6);
      g.gap = t.gap;
      g.scales = t.scales;
      g.k200 = weak_qs_constant(side_samples(P, pair, 200));
      g.k400 = weak_qs_constant(side_samples(P, pair, 400));
      g.ok = g.c200 > 0.0 && within(g.c400, g.c200, 0.1) && t.transverse && within(g.k400, g.k200, 0.1);
    } catch (const Error& e) {
      g.error = e.what();
    }
    all = all && g.ok;
    csv << g.cut << ',' << csv_number(c.root.real()) << ',' << csv_number(c.root.imag()) << ',' << g.critical << ','
        << csv_number(g.c200) << ',' << csv_number(g.c400) << ',' << csv_number(g.gap) << ',' << g.scales << ','
        << csv_number(g.k200) << ',' << csv_number(g.k400) << ',' << verdict(g.ok) << '\n';
    if (!g.error.empty())
      ctx.emit("carrot of cut " + std::to_string(g.cut) + ": " + g.error);
    else
      ctx.emit("carrot of cut " + std::to_string(g.cut) + " at " + point(c.root) + ": C = " + fixed(g.c200) + " / " +
               fixed(g.c400) + ", gap = " + fixed(g.gap) + " over " + std::to_string(g.scales) +
               " scales, kappa = " + fixed(g.k200) + " / " + fixed(g.k400) + ": " + verdict(g.ok));
  }
  write_text_file(ctx.path("_carrots.csv"), polylines_csv(curves));
  write_text_file(ctx.path("_carrot_geometry.csv"), csv.str());
  return all;
}

bool stage_verify(Context& ctx, const CutFamily& Z) {
  if (!ctx.scene.q_coeffs) throw Error(ErrorCode::InvalidInput, "scene has no candidate polynomial Q");
  const Polynomial Q(*ctx.scene.q_coeffs);
  const auto r = conjugacy_report(Z.poly(), Z, Q, ctx.scene.max_period);
  write_text_file(ctx.path("_census.csv"), census_csv(r));
  write_text_file(ctx.path("_multipliers.csv"), multipliers_csv(r));
  std::istringstream lines(report_text(r));
  for (std::string line; std::getline(lines, line);) ctx.emit(line);
  return r.pass;
}

int finish(Context& ctx, const std::string& name, bool ok) {
  ctx.emit(name + ": " + verdict(ok));
  const bool own = name == ctx.scene.output_prefix;
  write_text_file(ctx.path(own ? "_report.txt" : "_" + name + "_report.txt"), ctx.report.str());
  return ok ? kExitPass : kExitCheckFailed;
}

int run_julia(Context& ctx) {
  const Polynomial P = ctx.scene.poly();
  Layers layers;
  const Mask K = compute_mask(P, nullptr, ctx.scene.grid, ctx.mask_options(ctx.scene.max_iter));
  const auto esc = escape_counts(P, ctx.scene.grid, ctx.scene.max_iter, ctx.opts.threads);
  layers.filled = &K;
  layers.escape = &esc;
  layers.max_iter = ctx.scene.max_iter;
  compose(ctx.scene.grid, layers, palette_colors(ctx.scene.palette)).save_ppm(ctx.path("_julia.ppm"));
  {
    std::ofstream raw(ctx.path("_julia.mask"), std::ios::binary);
    write_raw_mask(raw, K);
  }
  std::ostringstream csv;
  csv << "metric,value\nresolution," << ctx.scene.grid.resolution << "\nfilled_pixels," << K.count() << '\n';
  write_text_file(ctx.path("_julia.csv"), csv.str());
  ctx.emit("filled Julia set: " + std::to_string(K.count()) + " pixels");
  return finish(ctx, "julia", true);
}

int run_ray(Context& ctx) {
  const BoettcherSolver B(ctx.scene.poly());
  return finish(ctx, "ray", stage_rays(ctx, B));
}

int run_cuts_check(Context& ctx) {
  const auto Z = build_family(ctx, ctx.scene.poly());
  return finish(ctx, "cuts-check", stage_cuts(ctx, Z));
}

int run_avoid(Context& ctx) {
  const auto Z = build_family(ctx, ctx.scene.poly());
  const auto r = stage_avoid(ctx, Z);
  Layers layers;
  layers.filled = &r.filled;
  layers.avoiding = &r.avoiding;
  layers.wedges = &r.wedges;
  layers.escape = &r.escape;
  layers.max_iter = ctx.scene.max_iter;
  layers.rays = cut_rays(Z);
  compose(ctx.scene.grid, layers, palette_colors(ctx.scene.palette)).save_ppm(ctx.path("_avoid.ppm"));
  return finish(ctx, "avoid", r.ok);
}

int run_carrot(Context& ctx) {
  const auto Z = build_family(ctx, ctx.scene.poly());
  std::vector<Carrot> carrots;
  const bool ok = stage_carrots(ctx, Z, carrots);
  const Mask K = compute_mask(Z.poly(), nullptr, ctx.scene.grid, ctx.mask_options(ctx.scene.max_iter));
  Layers layers;
  layers.filled = &K;
  layers.rays = cut_rays(Z);
  for (const auto& c : carrots) layers.carrots.push_back(c.boundary);
  compose(ctx.scene.grid, layers, palette_colors(ctx.scene.palette)).save_ppm(ctx.path("_carrot.ppm"));
  return finish(ctx, "carrot", ok);
}

int run_surgery(Context& ctx) {
  const auto Z = build_family(ctx, ctx.scene.poly());
  SurgeryOptions so;
  so.threads = ctx.opts.threads;
  const auto S = SurgeryMap::build(Z, ctx.scene.carrot_rho(), so);
  ctx.emit("f built: d_c = " + std::to_string(S.d_c()) + ", " + std::to_string(S.T_cr()) +
           " critical carrot(s), continuity gap " + fixed(S.continuity_gap(), 3));

  bool degree_ok = false;
  std::ostringstream csv;
  csv << "metric,value\nd_c_formula," << S.d_c() << '\n';
  try {
    const auto D = degree_dc(S);
    degree_ok = D.consistent;
    std::string w, pc;
    for (int x : D.winding) w += " " + std::to_string(x);
    for (int x : D.preimage_counts) pc += " " + std::to_string(x);
    ctx.emit("degree: formula " + std::to_string(D.formula) + ", winding" + w + ", preimages" + pc);
    csv << "winding_min," << *std::min_element(D.winding.begin(), D.winding.end()) << '\n'
        << "winding_max," << *std::max_element(D.winding.begin(), D.winding.end()) << '\n'
        << "preimages_min," << *std::min_element(D.preimage_counts.begin(), D.preimage_counts.end()) << '\n'
        << "preimages_max," << *std::max_element(D.preimage_counts.begin(), D.preimage_counts.end()) << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegreeMismatch) throw;
    ctx.emit(e.what());
  }

  const auto V = visit_count_experiment(S, ctx.scene.grid, 10000, ctx.scene.max_iter, ctx.scene.seed, ctx.opts.threads);
  const bool visits_ok = V.max_cr_visits <= S.T_cr();
  ctx.emit("visits: max A_cr " + std::to_string(V.max_cr_visits) + " (bound " + std::to_string(S.T_cr()) +
           "), max A " + std::to_string(V.max_visits) + " over " + std::to_string(V.n_seeds) + " seeds");

  const auto mo = ctx.mask_options(ctx.scene.max_iter);
  const Mask N = nonescaping_mask(S, ctx.scene.grid, mo);
  const Mask A = compute_mask(Z.poly(), &Z, ctx.scene.grid, mo);
  const auto cmp = compare_masks(N, A, 2);
  const bool mask_ok = cmp.strict_agreement >= 0.97;
  ctx.emit("non-escaping mask vs avoiding set: " + fixed(100.0 * cmp.strict_agreement, 6) +
           "% agreement outside a 2-pixel band");

  const auto dil = dilatation(S);
  ctx.emit("dilatation: max " + fixed(dil.max_ratio) + ", " + std::to_string(dil.flagged) + " sample(s) above 100, " +
           std::to_string(dil.reversing) + " orientation-reversing, of " + std::to_string(dil.samples));

  csv << "continuity_gap," << csv_number(S.continuity_gap()) << '\n'
      << "seed," << V.seed << '\n'
      << "max_cr_visits," << V.max_cr_visits << '\n'
      << "max_visits," << V.max_visits << '\n'
      << "mask_agreement," << csv_number(cmp.agreement) << '\n'
      << "mask_strict_agreement," << csv_number(cmp.strict_agreement) << '\n'
      << "dilatation_max," << csv_number(dil.max_ratio) << '\n'
      << "dilatation_flagged," << dil.flagged << '\n'
      << "dilatation_reversing," << dil.reversing << '\n';
  write_text_file(ctx.path("_surgery.csv"), csv.str());

  Layers layers;
  layers.avoiding = &N;
  for (const auto& c : S.carrots()) layers.carrots.push_back(c.boundary);
  compose(ctx.scene.grid, layers, palette_colors(ctx.scene.palette)).save_ppm(ctx.path("_surgery.ppm"));
  return finish(ctx, "surgery", degree_ok && visits_ok && mask_ok);
}

int run_verify(Context& ctx) {
  const auto Z = build_family(ctx, ctx.scene.poly());
  return finish(ctx, "verify", stage_verify(ctx, Z));
}

int run_figure1(Context& ctx) {
  const Polynomial P = ctx.scene.poly();
  const auto Z = build_family(ctx, P);
  const bool rays_ok = stage_rays(ctx, Z.solver());
  const bool cuts_ok = stage_cuts(ctx, Z);
  const auto av = stage_avoid(ctx, Z);
  std::vector<Carrot> carrots;
  const bool carrots_ok = stage_carrots(ctx, Z, carrots);
  const bool verify_ok = stage_verify(ctx, Z);

  Layers layers;
  layers.filled = &av.filled;
  layers.avoiding = &av.avoiding;
  layers.wedges = &av.wedges;
  layers.escape = &av.escape;
  layers.max_iter = ctx.scene.max_iter;
  layers.rays = cut_rays(Z);
  for (const auto& c : carrots) layers.carrots.push_back(c.boundary);
  compose(ctx.scene.grid, layers, palette_colors(ctx.scene.palette)).save_ppm(ctx.path(".ppm"));
  return finish(ctx, "figure1", rays_ok && cuts_ok && av.ok && carrots_ok && verify_ok);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"julia", "ray", "cuts-check", "avoid", "carrot", "surgery", "verify", "figure1"};
  return names;
}

Scene apply_overrides(Scene scene, const RunOptions& opts) {
  if (opts.resolution > 0) scene.grid.resolution = opts.resolution;
  if (opts.max_iter > 0) scene.max_iter = opts.max_iter;
  if (opts.supersample != 1 && opts.supersample != 2) throw Error(ErrorCode::InvalidInput, "--supersample must be 1 or 2");
  scene.grid.validate();
  return scene;
}

int run_subcommand(const std::string& name, const Scene& scene, const RunOptions& opts, std::ostream& log) {
  std::filesystem::create_directories(opts.out_dir);
  Context ctx{scene, opts, log, {}};
  if (name == "julia") return run_julia(ctx);
  if (name == "ray") return run_ray(ctx);
  if (name == "cuts-check") return run_cuts_check(ctx);
  if (name == "avoid") return run_avoid(ctx);
  if (name == "carrot") return run_carrot(ctx);
  if (name == "surgery") return run_surgery(ctx);
  if (name == "verify") return run_verify(ctx);
  if (name == "figure1") return run_figure1(ctx);
  throw Error(ErrorCode::InvalidInput, "unknown subcommand '" + name + "'");
}

}  // namespace renorm
