/**
 * @file config_io.hpp
 * @brief Text configuration format.
 *
 * UTF-8, `key = value` lines grouped under `[domain]`, `[law]`, `[penalty]`,
 * `[stepping]`, `[initial]` and `[diagnostics]`. `#` and `;` start comments.
 * Required keys: `horizon` ([domain]) and `epsilon` ([penalty]); everything
 * else has a default. Unknown sections or keys are errors. See
 * docs/config.md for the full key list.
 */
#pragma once

#include "obstacle/config.hpp"

#include <string>

namespace obstacle {

/// Parses and validates. Errors are ConfigError carrying the key and line.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Effective configuration with every default spelled out; parse_config of the
/// result reproduces `config`.
std::string emit_config(const SimConfig& config);

/// Recovers an effective configuration embedded as '# '-prefixed lines between
/// the `# --- config ---` markers of a report.
std::string extract_config_echo(const std::string& report_text);

}  // namespace obstacle
