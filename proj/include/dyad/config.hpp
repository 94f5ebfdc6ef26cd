#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyad/model.hpp"

namespace dyad::cli {

/// Config-file problem; `key` names the offending key when known.
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(const std::string& k, const std::string& msg)
      : std::runtime_error(msg), key(k) {}
};

/// One `key = value` entry.  Ranged values use list syntax: [v1, v2, v3].
struct ConfigValue {
  std::string raw;
  bool is_list = false;
  std::vector<std::string> items;  // list entries, or {raw} for scalars
};

/// Flat sections of key = value lines, '#' comments, UTF-8.  Keys are stored
/// as "section.key"; entries before any [section] header keep their bare name.
struct RawConfig {
  std::map<std::string, ConfigValue> entries;
  std::string source_text;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
};

RawConfig parse_config_text(const std::string& text);
RawConfig load_config_file(const std::string& path);

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::string> out_dir;
  int workers = 0;
  unsigned long long seed = 0;
};

/// Fully resolved settings with every default materialized.
struct RunSettings {
  std::string command;

  Model model;

  // numerics
  int n_shells = 12;
  double dt = 1e-3;
  double t_end = 1.0;
  int grid_m = 4096;
  int j_max = 12;
  int store_every = 1;

  // initial data family
  std::string initial_kind = "zero";  // zero | decaying | impulse | random
  double initial_amplitude = 0.4;
  double initial_decay = 2.0;
  int initial_shell = 0;
  double initial_value = 1.0;

  std::string forcing_kind = "zero";  // zero | synthesized

  // construction
  double rho = 0.0;  // 0 -> variant default
  double q_amplitude = 1.0;
  double d0 = 1.0;
  std::optional<double> fixed_p;
  double p_min = -50.0, p_max = 50.0, q_min = -50.0, q_max = 50.0;
  int n_coarse = 101;
  double r_target = 0.0;  // 0 -> lambda

  // io
  std::string out_dir;
  bool write_csv = true;
  bool write_json = true;

  int workers = 0;
  unsigned long long seed = 0;
};

/// Validates the schema strictly (unknown keys rejected, required keys per
/// command present, types parseable) and materializes defaults.  Ranged
/// values are only legal for the sweep command.
RunSettings resolve_settings(const RawConfig& raw, const Overrides& overrides);

/// Keys carrying list values, in deterministic order.
std::vector<std::string> ranged_keys(const RawConfig& raw);

/// Substitutes one list entry for a ranged key, yielding a scalar config.
RawConfig substitute(const RawConfig& raw, const std::string& key,
                     const std::string& value);

/// FNV-1a 64-bit content hash, hex encoded.
std::string content_hash(const std::string& text);

/// 17-significant-digit formatting used by every artifact writer.
std::string format_double(double x);

}  // namespace dyad::cli
