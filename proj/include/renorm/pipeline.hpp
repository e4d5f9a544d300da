#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "renorm/scene.hpp"

namespace renorm {

struct RunOptions {
  std::string out_dir = ".";
  int resolution = 0;   // 0 keeps the scene value
  int max_iter = 0;     // 0 keeps the scene value
  int threads = 0;      // 0 means RENORM_THREADS or hardware concurrency
  int supersample = 1;  // 1 or 2
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;

const std::vector<std::string>& subcommands();

Scene apply_overrides(Scene scene, const RunOptions& opts);

// Runs one subcommand, writes its artifacts under opts.out_dir and a summary to
// `log`. Returns kExitPass or kExitCheckFailed; errors propagate as exceptions.
int run_subcommand(const std::string& name, const Scene& scene, const RunOptions& opts, std::ostream& log);

}  // namespace renorm
