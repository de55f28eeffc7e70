#pragma once

#include <string>
#include <vector>

namespace lidc::cli {

// Exit codes: 0 success, 1 data/model errors, 2 bad flags or configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, char** argv);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args);

/// Expands a JSON config file into flags for every key not already given on
/// the command line. Exposed for testing.
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::string& config_text);

}  // namespace lidc::cli
