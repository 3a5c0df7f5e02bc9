#include "json_config.hpp"

#include <istream>

#include <json.hpp>

namespace freqent::cli {

namespace {

using nlohmann::ordered_json;

std::string scalar_text(const ordered_json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number() || j.is_boolean()) return j.dump();
  throw CLI::ConfigError("unsupported value for '" + where + "' in JSON config");
}

void collect(const ordered_json& obj, std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      parents.push_back(key);
      collect(value, parents, out);
      parents.pop_back();
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar_text(v, item.fullname()));
    } else {
      item.inputs.push_back(scalar_text(value, item.fullname()));
    }
    out.push_back(std::move(item));
  }
}

ordered_json dump_app(const CLI::App* app, bool default_also) {
  ordered_json j = ordered_json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    std::vector<std::string> values = opt->reduced_results();
    if (values.empty() && default_also && !opt->get_default_str().empty())
      values.push_back(opt->get_default_str());
    if (values.empty()) continue;
    if (values.size() == 1) {
      j[name] = values.front();
    } else {
      j[name] = values;
    }
  }
  for (const CLI::App* sub : app->get_subcommands({})) {
    auto child = dump_app(sub, default_also);
    if (!child.empty()) j[sub->get_name()] = std::move(child);
  }
  return j;
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool,
                                  std::string) const {
  return dump_app(app, default_also).dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  ordered_json root;
  try {
    root = ordered_json::parse(input);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!root.is_object()) throw CLI::ConfigError("JSON config must be an object");
  std::vector<CLI::ConfigItem> items;
  std::vector<std::string> parents;
  collect(root, parents, items);
  return items;
}

}  // namespace freqent::cli
