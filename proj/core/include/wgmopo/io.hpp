#pragma once

#include <string>

namespace wgmopo {

// Writes `content` to `path` atomically: the bytes go to `path + ".tmp"`
// first and are renamed over the target, so a crash never leaves a
// half-written output file.  Throws DataError on I/O failure.
void atomic_write_text(const std::string& path, const std::string& content);

// Reads a whole file into a string.  Throws DataError if unreadable.
std::string read_text(const std::string& path);

// Deterministic decimal formatting for output files.  `format_double` uses
// shortest round-trip formatting (no locale, no exponent surprises for the
// magnitudes we emit); `format_fixed` pins the digit count for columns where
// a stable width matters.
std::string format_double(double value);
std::string format_fixed(double value, int digits);

}  // namespace wgmopo
