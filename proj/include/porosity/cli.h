#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <string>
#include <vector>

#include "porosity/dataset.h"

namespace porosity::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum ExitCode : int { kOk = 0, kUsage = 1, kDataFailure = 2, kNumericalFailure = 3 };

// Parses and executes one command line (args[0] is the program name).
// Diagnostics go to `err` as a single line; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Artificial mixes: w/b 0.4, binder 400, no SP, CA/FA 2, air curing.
// "fly_ash": {0..40}% x {7, 28, 90, 180, 270} days; "ggbs": {0..40}% x
// {3, 7, 28, 56} days. Throws ParamError for other types.
std::vector<MixRecord> sensitivity_grid(std::string_view type);

}  // namespace porosity::cli
