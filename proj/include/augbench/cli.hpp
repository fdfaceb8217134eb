#pragma once

#include <string>
#include <vector>

#include "augbench/augmenter.hpp"

namespace augbench {
namespace cli {

// Exit codes: 0 success, 1 fatal error, 2 finished with unreliable cells.
constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitUnreliable = 2;

// Entry point shared by the binary and the tests. `args` excludes argv[0].
// A custom catalog (e.g. with injected stages) may be supplied by tests;
// nullptr builds the standard one from the config.
int run(const std::vector<std::string>& args, const harness::Catalog* catalog = nullptr);

}  // namespace cli
}  // namespace augbench
