#pragma once

#include "patchsim/strategy.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patchsim::cli {

/// Bad flag values or missing inputs; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kDataDirEnv = "PATCHSIM_DATA_DIR";

/// "immediate,planned:1,reactive:3,informed:7" -> configs (scenario left as update-first).
std::vector<StrategyConfig> parse_strategies(std::string_view text);
std::vector<Scenario> parse_scenarios(std::string_view text);
/// "name[:delay][@scenario]", scenario defaults to update-first.
StrategyConfig parse_baseline(std::string_view text);

/// Runs the command line (args[0] is the program name). Exit codes: 0 ok,
/// 1 data or validation failure, 2 usage or I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace patchsim::cli
