#ifndef EHSIM_CONFIG_HPP
#define EHSIM_CONFIG_HPP

#include <string>

#include "ehsim/sim_engine.hpp"

namespace ehsim {

// Parses the INI-style key = value format described in the README. Unknown
// sections or keys and out-of-range values raise config_error with the key
// name and line number. An empty file yields the default configuration.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Serializes a config in the same format; parse_config_text(config_text(c))
// reproduces c exactly.
std::string config_text(const ExperimentConfig& cfg);

}  // namespace ehsim

#endif
