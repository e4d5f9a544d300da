#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "renorm/error.hpp"
#include "renorm/pipeline.hpp"
#include "renorm/scene.hpp"

int main(int argc, char** argv) {
  using namespace renorm;
  CLI::App app{"Avoiding sets, carrots and degree-lowering surgery for polynomial Julia sets"};
  app.require_subcommand(1, 1);

  const std::map<std::string, std::string> help{
      {"julia", "Filled Julia set image and escape statistics"},
      {"ray", "Trace the scene rays and report their landing points"},
      {"cuts-check", "Build the cut family and check admissibility and legality"},
      {"avoid", "Avoiding set mask, subset, component and stability checks"},
      {"carrot", "Carrots of the cut family and their geometry estimates"},
      {"surgery", "Degree-lowering surgery map and its checks"},
      {"verify", "Cycle census and multiplier comparison against the candidate Q"},
      {"figure1", "Full pipeline on the built-in figure scene"}};

  std::string scene_path;
  RunOptions opts;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    if (name == "figure1")
      sub->add_option("--scene", scene_path, "Scene JSON (defaults to the built-in figure scene)");
    else
      sub->add_option("--scene", scene_path, "Scene JSON")->required();
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--resolution", opts.resolution, "Grid resolution override")->check(CLI::Range(16, 16384));
    sub->add_option("--max-iter", opts.max_iter, "Iteration budget override")->check(CLI::Range(1, 1 << 24));
    sub->add_option("--threads", opts.threads, "Worker threads (0 = RENORM_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--supersample", opts.supersample, "Samples per pixel side")->check(CLI::IsMember({1, 2}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Scene scene = scene_path.empty() ? figure1_scene() : load_scene(scene_path);
    scene = apply_overrides(std::move(scene), opts);
    return run_subcommand(name, scene, opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
