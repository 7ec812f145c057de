#pragma once

#include <iosfwd>
#include <string>

#include "gsa/dynamics.hpp"

namespace gsa {

/// Binary state dump, all fields little-endian:
///   8 bytes  magic "GSADUMP1"
///   uint64   basis contract hash
///   float64  time
///   uint64   number of amplitudes
///   float64  re, im for every amplitude in basis order
void write_state(std::ostream& out, const Basis& basis, const SystemState& state);
void write_state(const std::string& path, const Basis& basis, const SystemState& state);

/// Reads a dump and checks it against `basis`; throws ConfigError on a malformed file or a
/// basis mismatch.
SystemState read_state(std::istream& in, const Basis& basis);
SystemState read_state(const std::string& path, const Basis& basis);

}  // namespace gsa
