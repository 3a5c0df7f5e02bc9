// JSON reader for CLI11 --config files. Top-level objects are subcommand
// sections; scalars map to option values, arrays to multi-value options:
//
//   { "hom": { "l": 2, "omega": 2e12, "method": "numeric" },
//     "phasematch": { "sellmeier-o": [2.7359, 0.01878, 0.01822, 0.01354] } }
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace freqent::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace freqent::cli
