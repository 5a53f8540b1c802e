#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spusim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `spusim` binary and the tests. Failures print a
/// single line `error: code=<n> kind=<usage|runtime> message="<text>"` to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace spusim::cli
