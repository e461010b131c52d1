#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "ghcm/model.hpp"

namespace ghcm {

/// Sectioned key-value text (INI dialect). Lines starting with '#' or ';' are comments.
using ConfigTree = boost::property_tree::ptree;

ConfigTree read_config_tree(std::istream& in);
ConfigTree read_config_file(const std::string& path);
std::string write_config_tree(const ConfigTree& tree);

/// Reads [model] and [family]; throws ConfigError with the offending key.
ModelConfig model_config_from_tree(const ConfigTree& tree);
/// Writes [model] and [family] in full (per-pair entries, round-trip exact).
void model_config_to_tree(const ModelConfig& config, ConfigTree& tree);

DistributionFamily family_from_tree(const ConfigTree& family_section, int k, double r);

/// Whitespace-separated reals; throws ConfigError naming `key` on failure.
std::vector<double> parse_reals(const std::string& text, const std::string& key);
double parse_real(const std::string& text, const std::string& key);

/// Shortest text that parses back to the same double.
std::string format_real(double value);

}  // namespace ghcm
