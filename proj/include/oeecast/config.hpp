#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oeecast/pipeline.hpp"

namespace oeecast {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;  // empty for keys before the first [section]
  std::vector<ConfigEntry> entries;
};

/// key = value lines grouped under [section] headers. '#' and ';' start
/// comments; values may be double-quoted. Errors name the source and line.
std::vector<ConfigSection> parse_config_text(const std::string& text, const std::string& source = "<text>");
std::vector<ConfigSection> parse_config_file(const std::filesystem::path& path);

/// Sets one PipelineConfig field. Relative dataset paths resolve against
/// base_dir. Throws InvalidArgument for an unknown key or a bad value.
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value,
                        const std::filesystem::path& base_dir = {});

struct ConfigFile {
  PipelineConfig pipeline;
  SelectionMode statistical_selection = SelectionMode::None;  // benchmark rows
  SelectionMode topological_selection = SelectionMode::None;
};

/// Top-level and [pipeline] keys set pipeline fields; [benchmark] takes
/// statistical_selection and topological_selection.
ConfigFile load_config(const std::filesystem::path& path);

struct RegistryEntry {
  std::string id;
  PipelineConfig config;
};

struct EquipmentRegistry {
  std::vector<RegistryEntry> entries;

  const RegistryEntry* find(const std::string& id) const;
};

/// Top-level keys are defaults for every entry; each [id] section is one
/// equipment unit and must set a dataset that exists.
EquipmentRegistry load_registry(const std::filesystem::path& path);
EquipmentRegistry parse_registry(const std::string& text, const std::filesystem::path& base_dir,
                                 const std::string& source = "<text>");

}  // namespace oeecast
