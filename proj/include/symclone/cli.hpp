// cli.hpp — command-line front end: verification sweeps, flow and ensemble
// experiments, oracle gates, and the one-shot results table.
#pragma once

#include <string>
#include <vector>

namespace symclone::cli {

// Exit codes: 0 success, 1 scientific failure, 2 usage/config error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace symclone::cli
