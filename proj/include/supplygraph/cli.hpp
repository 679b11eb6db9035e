#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "supplygraph/graph.hpp"

namespace supplygraph {

/// Settings shared by the command-line subcommands.
struct Config {
  std::vector<std::filesystem::path> snapshots;
  std::filesystem::path platform_file;  // serve cards from this file instead
  StubPolicy stub_policy = StubPolicy::Create;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  int restarts = 8;
  std::size_t k = 10;
  std::string salt;
  std::size_t parallelism = 4;

  /// Throws InvalidConfig unless parallelism >= 1, k >= 1, resolution > 0
  /// and restarts >= 0.
  void validate() const;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on a usage error and 2 on a data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace supplygraph
