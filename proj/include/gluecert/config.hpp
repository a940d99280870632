#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gluecert/certify.hpp"

namespace gluecert {

// Minimal TOML subset: `key = value` lines with numbers, booleans, quoted
// strings and flat arrays of numbers; '#' comments; section headers flatten
// to dotted prefixes.  Enough for run configuration files.
struct TomlValue {
  std::variant<double, bool, std::string, std::vector<double>> v;

  double number() const;
  bool boolean() const;
  const std::string& str() const;
  const std::vector<double>& array() const;
};

std::map<std::string, TomlValue> parse_toml(const std::string& text);

// Run configuration for the certify workflow; all fields have defaults and
// are overridable by CLI flags.
struct RunConfig {
  std::string scheme = "cps2d";
  int dim = 2;
  CertifySearch search;
  int check_rounds = 10;
  std::string out_path;

  // resolved key=value echo, recorded in outputs for reproducibility
  std::string echo() const;
};

RunConfig load_run_config(const std::string& path);
void apply_toml(RunConfig& cfg, const std::map<std::string, TomlValue>& kv);

int threads_from_env();

}  // namespace gluecert
