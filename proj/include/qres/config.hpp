#ifndef QRES_CONFIG_HPP
#define QRES_CONFIG_HPP

// Flat key = value configuration files.
//
//   # comment
//   mode = "ramsey"
//   steps = 2001
//   verbose = true
//   delta_omega_list = [-0.012, 0.012]
//
// One assignment per line. Values are double-quoted strings, booleans,
// numbers or single-line arrays of numbers.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qres/edm.hpp"
#include "qres/scan.hpp"

namespace qres {

struct ConfigValue {
  enum class Kind { boolean, number, string, array };
  Kind kind = Kind::number;
  bool boolean = false;
  double number = 0.0;
  std::string text;  ///< string contents, or the number as written
  std::vector<double> array;
  int line = 0;  ///< 0 for command-line overrides
};

using ConfigTable = std::map<std::string, ConfigValue>;

/// Throws ParseError(line, reason) on malformed lines and duplicate keys.
ConfigTable parse_kv(std::string_view text);

/// Applies "key=value" overrides on top of the file values. Malformed
/// overrides throw ParseError with line 0.
void apply_overrides(ConfigTable& table, const std::vector<std::string>& overrides);

/// Typed, validated configs. Unknown keys, wrong types and out-of-range values
/// are collected into one ValidationError naming every offending key.
ScanConfig scan_config_from(const ConfigTable& table);
EdmConfig edm_config_from(const ConfigTable& table);

ScanConfig parse_scan_config(std::string_view text, const std::vector<std::string>& overrides = {});
EdmConfig parse_edm_config(std::string_view text, const std::vector<std::string>& overrides = {});

}  // namespace qres

#endif  // QRES_CONFIG_HPP
