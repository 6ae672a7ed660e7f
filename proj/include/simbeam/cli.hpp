#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace simbeam {

/// Exit codes: 0 success, 1 runtime failure, 2 invalid arguments or spec.
int cli_main(int argc, char** argv);

/// "a..b" (inclusive) or a single integer.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

} // namespace simbeam
