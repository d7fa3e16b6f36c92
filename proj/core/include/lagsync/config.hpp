#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lagsync/simulation.hpp"

namespace lagsync {

/**
 * @brief Scenario files.
 *
 * Sectioned key-value text: `[section]` headers, `key = value` lines, `#`
 * comments. Values are numbers, quoted strings, booleans, arrays (which may
 * span lines) and inline tables `{k = v, ...}`. Exponents are written as
 * "num/den" strings. `edge` may repeat inside [network]; `[agent.K]`
 * overrides theta or gravity of follower K.
 *
 * Throws ParseError (with line and column) on malformed text and
 * ValidationError (with the offending key) on missing or invalid values.
 */
Scenario parse_config_text(std::string_view text);
Scenario parse_config(const std::filesystem::path& path);

/// Bundled scenario name or file path.
Scenario load_scenario(const std::string& name_or_path);

/// Text that parses back to an equal Scenario.
std::string emit_config(const Scenario& s);

/// Text of a bundled scenario, empty when unknown.
std::string_view bundled_scenario_text(std::string_view name);

}  // namespace lagsync
