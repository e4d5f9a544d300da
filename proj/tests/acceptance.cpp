// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "renorm/boettcher.hpp"
#include "renorm/carrot.hpp"
#include "renorm/cuts.hpp"
#include "renorm/error.hpp"
#include "renorm/estimators.hpp"
#include "renorm/mask.hpp"
#include "renorm/scene.hpp"
#include "renorm/surgery.hpp"
#include "renorm/verify.hpp"

using namespace renorm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
using Coeffs = std::vector<Complex>;

const Polynomial kFig1({0.0, 4.0, 4.0, 1.0});
const GridSpec kFigGrid{{-1.5, 0.0}, 3.8, 512};

const CutFamily& fig1() {
  static const CutFamily Z =
      CutFamily::build(kFig1, {{Angle(1, 3), Angle(2, 3)}, {Angle(0, 1), Angle(0, 1)}}, 0.5);
  return Z;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream line;
  line << std::fixed << std::setprecision(2) << secs << " s";
  if (budget_s > 0.0) {
    line << " (budget " << budget_s << " s)";
    if (secs >= budget_s) {
      o.pass = false;
      o.detail += "; over the runtime budget";
    }
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " [" << title << "]: " << o.detail << "; "
            << line.str() << std::endl;
}

std::string num(double x, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

// Independent oracle for periodic points: distinct roots of Q^n(z) - z from the
// companion matrix of the expanded composition, polished by Newton on the composition.
Coeffs mul(const Coeffs& a, const Coeffs& b) {
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

int brute_force_cycles(const Coeffs& q, int n) {
  Coeffs it = q;
  for (int k = 1; k < n; ++k) {
    Coeffs next{q.back()};
    for (std::size_t j = q.size() - 1; j-- > 0;) {
      next = mul(next, it);
      next[0] += q[j];
    }
    it = next;
  }
  it[1] -= 1.0;
  const int deg = static_cast<int>(it.size()) - 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) M(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) M(i, deg - 1) = -it[i] / it[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  auto horner = [&](Complex w, Complex& dv) {
    Complex v = 0.0;
    dv = 0.0;
    for (std::size_t j = q.size(); j-- > 0;) {
      dv = dv * w + v;
      v = v * w + q[j];
    }
    return v;
  };
  std::vector<Complex> distinct;
  for (int r = 0; r < deg; ++r) {
    Complex z = es.eigenvalues()[r];
    for (int s = 0; s < 100; ++s) {
      Complex w = z, d = 1.0, dv;
      for (int k = 0; k < n; ++k) {
        w = horner(w, dv);
        d *= dv;
      }
      z -= (w - z) / (d - 1.0);
    }
    bool seen = false;
    for (const auto& p : distinct) seen = seen || std::abs(p - z) < 1e-5;
    if (!seen) distinct.push_back(z);
  }
  int exact = 0;
  for (const auto& z : distinct) {
    bool lower = false;
    Complex w = z, dv;
    for (int k = 1; k < n; ++k) {
      w = horner(w, dv);
      lower = lower || std::abs(w - z) < 1e-4;
    }
    exact += !lower;
  }
  return exact / n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main() {
  run(1, "baseline dynamics", 10.0, [] {
    const Polynomial sq({0.0, 0.0, 1.0});
    const GridSpec g{{0.0, 0.0}, 3.0, 512};
    const Mask K = compute_mask(sq, nullptr, g, {512, 0, 1});
    std::size_t diff = 0;
    for (int i = 0; i < g.resolution; ++i)
      for (int j = 0; j < g.resolution; ++j) diff += K.at(i, j) != (std::abs(g.pixel_center(i, j)) <= 1.0);
    const double frac = static_cast<double>(diff) / K.bits.size();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> radius(2.0, 10.0), angle(0.0, 2.0 * std::acos(-1.0));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Complex z = std::polar(radius(rng), angle(rng));
      worst = std::max(worst, std::abs(green_potential(sq, z) - std::log(std::abs(z))));
    }
    return Outcome{frac < 0.01 && worst < 1e-9,
                   "disk mismatch " + num(100.0 * frac) + "% (< 1%), max |G - log|z|| " + num(worst) + " (< 1e-9)"};
  });

  run(2, "figure landing", 5.0, [] {
    const BoettcherSolver B(kFig1);
    double worst = 0.0;
    std::string notes;
    for (const auto& [theta, target] :
         std::vector<std::pair<Angle, Complex>>{{Angle(1, 3), -2.0}, {Angle(2, 3), -2.0}, {Angle(0, 1), 0.0}}) {
      const auto ray = trace_ray(B, theta, 20.0, 1e-12);
      const auto L = landing_point(ray, B);
      const double e = L.converged ? std::abs(L.point - target) : INFINITY;
      worst = std::max(worst, e);
      notes += " " + theta.str() + "->" + num(e);
    }
    return Outcome{worst < 1e-6, "landing errors" + notes + " (< 1e-6)"};
  });

  run(3, "fixed-point census", 0.0, [] {
    // z(z+2)^2 - z = z(z+1)(z+3); P'(z) = 3z^2 + 8z + 4.
    const std::map<double, double> oracle{{0.0, 4.0}, {-1.0, -1.0}, {-3.0, 7.0}};
    const auto cycles = find_cycles(kFig1, 1).cycles;
    int matched = 0;
    double worst = 0.0;
    for (const auto& c : cycles) {
      if (c.period != 1) continue;
      for (const auto& [z, lambda] : oracle)
        if (std::abs(c.points[0] - z) < 1e-6) {
          ++matched;
          worst = std::max({worst, std::abs(c.points[0] - z), std::abs(c.multiplier - lambda),
                            std::abs(kFig1(c.points[0]) - c.points[0])});
        }
    }
    return Outcome{matched == 3 && cycles.size() == 3 && worst < 1e-9,
                   std::to_string(matched) + "/3 fixed points matched, max residual " + num(worst) + " (< 1e-9)"};
  });

  run(4, "legality", 0.0, [] {
    const auto& Z = fig1();
    const auto adm = check_admissible(kFig1, Z, 0.5);
    const auto leg = check_legal(kFig1, Z);
    bool critical = false, terminal = false;
    for (std::size_t i = 0; i < Z.cuts().size(); ++i)
      critical = critical || (std::abs(Z.cuts()[i].root + 2.0) < 1e-6 && Z.flags()[i].critical_root);
    for (const auto& row : leg.rows)
      if (row.pass && (row.check == "precritical" || row.check == "terminal-cycle") && row.other >= 0 &&
          std::abs(Z.cuts()[row.cut].root + 2.0) < 1e-6 && std::abs(Z.cuts()[row.other].root) < 1e-6 &&
          (row.detail.find("repelling") != std::string::npos || row.detail.find("degenerate") != std::string::npos))
        terminal = true;
    const auto& cls = Z.classification();
    bool repelling0 = false;
    for (std::size_t i = 0; i < Z.cuts().size(); ++i)
      repelling0 = repelling0 || (std::abs(Z.cuts()[i].root) < 1e-6 && Z.cuts()[i].degenerate &&
                                  classify_multiplier(cls[i].multiplier) == CycleKind::Repelling);
    return Outcome{adm.admissible && leg.legal && critical && terminal && repelling0,
                   std::string("admissible ") + (adm.admissible ? "yes" : "no") + ", legal " +
                       (leg.legal ? "yes" : "no") + ", -2 critical root " + (critical ? "yes" : "no") +
                       ", row -2 -> 0 " + (terminal ? "yes" : "no") + ", 0 repelling " + (repelling0 ? "yes" : "no")};
  });

  run(5, "avoiding set", 120.0, [] {
    GridSpec g = kFigGrid;
    g.resolution = 1024;
    const Mask K = compute_mask(kFig1, nullptr, g, {512, 0, 1});
    const Mask A = compute_mask(kFig1, &fig1(), g, {512, 0, 1});
    const Mask A2 = compute_mask(kFig1, &fig1(), g, {1024, 0, 1});
    std::size_t outside = 0, changed = 0;
    for (std::size_t k = 0; k < A.bits.size(); ++k) {
      outside += A.bits[k] && !K.bits[k];
      changed += A.bits[k] != A2.bits[k];
    }
    const bool strict = outside == 0 && A.count() < K.count();
    const int comps = connected_components(A).count;
    const double change = static_cast<double>(changed) / A.bits.size();
    return Outcome{strict && comps == 1 && change < 0.005,
                   "|A| " + std::to_string(A.count()) + " < |K| " + std::to_string(K.count()) + ", outside K " +
                       std::to_string(outside) + ", components " + std::to_string(comps) + ", change " +
                       num(100.0 * change) + "% (< 0.5%)"};
  });

  run(6, "proto-carrot equivariance", 0.0, [] {
    double worst = 0.0;
    for (int d : {2, 3, 4})
      for (double rho0 : {0.9, 0.95, 0.99}) worst = std::max(worst, proto_image_check({rho0, 0.1}, d, 1000));
    return Outcome{worst < 1e-12, "max deviation " + num(worst) + " (< 1e-12)"};
  });

  run(7, "carrot geometry", 0.0, [] {
    const auto carrots = build_carrots(fig1(), std::exp(-0.5));
    const Carrot* periodic = nullptr;
    const Carrot* critical = nullptr;
    for (const auto& c : carrots) {
      if (std::abs(c.root) < 1e-6) periodic = &c;
      if (fig1().flags()[c.cut].critical_root) critical = &c;
    }
    if (!periodic || !critical) return Outcome{false, "carrots missing"};
    const auto pair = side_pair(*periodic);
    const double c1 = quasi_arc_constant(pair, 200), c2 = quasi_arc_constant(pair, 400);
    const auto t = transversality_gap(periodic->side_r, periodic->side_l, periodic->root, 1e-6);
    // kappa of P restricted to the critical carrot sides.
    auto samples = [&](int n) {
      const auto line = side_pair(*critical);
      std::vector<std::pair<Complex, Complex>> out;
      for (int k = 0; k < n; ++k) {
        const Complex x = line[static_cast<std::size_t>(std::llround(static_cast<double>(k) * (line.size() - 1) / (n - 1)))];
        out.emplace_back(x, kFig1(x));
      }
      return out;
    };
    const double k1 = weak_qs_constant(samples(200)), k2 = weak_qs_constant(samples(400));
    const bool c_ok = c1 > 0.0 && std::abs(c2 - c1) < 0.1 * c1;
    const bool t_ok = t.transverse && t.gap > 0.1;
    const bool k_ok = std::isfinite(k1) && std::isfinite(k2) && std::abs(k2 - k1) <= 0.1 * k1;
    return Outcome{c_ok && t_ok && k_ok, "C " + num(c1) + " / " + num(c2) + ", gap " + num(t.gap) + " over " +
                                             std::to_string(t.scales) + " scales, kappa " + num(k1) + " / " + num(k2)};
  });

  run(8, "surgery", 300.0, [] {
    const auto S = SurgeryMap::build(fig1(), std::exp(-0.5));
    const auto D = degree_dc(S);
    bool windings = !D.winding.empty(), preimages = !D.preimage_counts.empty();
    for (int w : D.winding) windings = windings && w == 2;
    for (int c : D.preimage_counts) preimages = preimages && c == 2;
    const auto V = visit_count_experiment(S, kFigGrid, 10000, 512);
    const Mask N = nonescaping_mask(S, kFigGrid, {512, 0, 1});
    const Mask A = compute_mask(kFig1, &fig1(), kFigGrid, {512, 0, 1});
    const auto cmp = compare_masks(N, A, 2);
    const bool ok = D.formula == 2 && S.d_c() == 2 && windings && preimages && V.max_cr_visits <= S.T_cr() &&
                    S.T_cr() == 1 && cmp.strict_agreement >= 0.97;
    return Outcome{ok, "d_c formula " + std::to_string(D.formula) + ", windings " + (windings ? "2" : "mismatch") +
                           ", preimages " + (preimages ? "2" : "mismatch") + ", max A_cr visits " +
                           std::to_string(V.max_cr_visits) + " (<= " + std::to_string(S.T_cr()) +
                           "), mask agreement " + num(100.0 * cmp.strict_agreement, 5) + "% (>= 97%)"};
  });

  run(9, "conjugacy evidence", 60.0, [] {
    const Coeffs q{0.0, -1.0, 1.0};
    const auto good = conjugacy_report(kFig1, fig1(), Polynomial(q), 3);
    const auto bad = conjugacy_report(kFig1, fig1(), Polynomial({0.0, 0.0, 1.0}), 3);
    bool oracle = good.census.size() == 3;
    std::string counts;
    for (const auto& row : good.census) {
      const int brute = brute_force_cycles(q, row.period);
      oracle = oracle && brute == row.q_cycles;
      counts += " " + std::to_string(row.q_cycles) + "/" + std::to_string(brute);
    }
    bool parabolic = false;
    for (const auto& m : good.non_repelling)
      parabolic = parabolic || (m.matched() && std::abs(m.q_multiplier + 1.0) < 1e-6 &&
                                std::abs(m.p_multiplier + 1.0) < 1e-6);
    return Outcome{good.pass && good.counts_match && parabolic && !bad.pass && oracle,
                   std::string("z^2 - z ") + (good.pass ? "passes" : "fails") + ", z^2 " + (bad.pass ? "passes" : "fails") +
                       ", parabolic -1 matched " + (parabolic ? "yes" : "no") + ", Q cycles census/oracle" + counts};
  });

  run(10, "determinism", 0.0, [] {
    const fs::path root = fs::temp_directory_path() / "renorm_acceptance";
    fs::remove_all(root);
    std::vector<fs::path> dirs;
    for (int threads : {1, 1, 8, 8}) {
      const fs::path dir = root / ("run" + std::to_string(dirs.size()) + "_t" + std::to_string(threads));
      fs::create_directories(dir);
      const std::string cmd = std::string("\"") + RENORM_CLI_PATH + "\" figure1 --out \"" + dir.string() +
                              "\" --threads " + std::to_string(threads) + " > \"" + (dir / "log.txt").string() +
                              "\" 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) return Outcome{false, "figure1 run exited with " + std::to_string(rc)};
      dirs.push_back(dir);
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto ext = entry.path().extension();
      if (ext != ".ppm" && ext != ".csv") continue;
      ++files;
      const std::string ref = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        const fs::path other = dirs[k] / entry.path().filename();
        if (!fs::exists(other) || slurp(other) != ref) ++differing;
      }
    }
    for (std::size_t k = 1; k < dirs.size(); ++k) {
      std::size_t n = 0;
      for (const auto& entry : fs::directory_iterator(dirs[k]))
        n += entry.path().extension() == ".ppm" || entry.path().extension() == ".csv";
      if (n != files) ++differing;
    }
    return Outcome{files > 0 && differing == 0,
                   std::to_string(files) + " PPM/CSV files compared across 4 runs, " + std::to_string(differing) +
                       " differing"};
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criterion/criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
