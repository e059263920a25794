#pragma once

// Plain-text configuration files.
//
//   # comment
//   n_B = 3
//   a = 1/2, 1/3, 1/6
//   m_RU = 1            <- a single value is broadcast to every user
//
// Keys mirror the SystemConfig field names exactly. Values accept decimal
// numbers and simple fractions p/q. Unknown keys, duplicate keys and
// malformed values raise ConfigError with "source:line: key: reason".

#include <iosfwd>
#include <string>

#include "fdnoma/sysmodel.hpp"

namespace fdnoma {

/// Parses a config stream. Keys that are absent keep their SystemConfig
/// defaults. The result is validated (including SIC feasibility).
SystemConfig parse_config(std::istream& in, const std::string& source = "<config>");

SystemConfig load_config(const std::string& path);

/// Writes every key with 17 significant digits so that parse_config
/// reproduces an identical SystemConfig.
std::string serialize_config(const SystemConfig& cfg);

/// Shortest "%.17g" rendering used by every text output of the library.
std::string format_double(double x);

}  // namespace fdnoma
