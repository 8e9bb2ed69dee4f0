#pragma once

#include <cstdint>
#include <string>

namespace wgmopo {

// SHA-256 (FIPS 180-4) of a byte string, returned as lowercase hex.
// Local implementation so output files can embed a digest of the scenario
// that produced them without dragging in a crypto library.
std::string sha256_hex(const std::string& data);

}  // namespace wgmopo
