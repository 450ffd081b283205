#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace srm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the command line `args` (program name excluded). Results go to `out`,
/// a one-line diagnostic to `err`; returns the process exit code.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Decimal rendering with at least `precision` significant digits and at
/// least `precision` decimals, e.g. 1.644854, 4.200000, 0.0967902.
std::string format_value(double value, int precision = 6);

/// Grid size from SRM_DEFAULT_N, if set. Throws ParameterError when invalid.
std::optional<std::size_t> default_n_from_env();

}  // namespace srm::cli
