#pragma once

#include <map>
#include <string>
#include <vector>

#include "augbench/harness.hpp"
#include "augbench/synthetic.hpp"

namespace augbench {
namespace config {

// Sectioned key-value text ([data], [models], [augmentation], [evaluation]);
// '#' and ';' start comments. Keys are stored as "section.key".
struct ParsedConfig {
    std::map<std::string, std::string> values;

    std::string get(const std::string& key, const std::string& fallback) const;
    bool has(const std::string& key) const;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

// "--set section.key=value" override
void apply_override(ParsedConfig& cfg, const std::string& assignment);

// Canonical text form (sorted keys) used for the manifest and its hash.
std::string serialize_config(const ParsedConfig& cfg);
std::uint64_t config_hash(const ParsedConfig& cfg);

struct DataConfig {
    std::string source = "synthetic";  // "synthetic" or "csv"
    std::string csv_path;
    std::string label_column = "label";
    std::string group_column = "group";
    SyntheticSpec synthetic;
};

// Builds the experiment from the parsed text; rejects unknown keys.
struct ExperimentSetup {
    DataConfig data;
    harness::ExperimentConfig experiment;
    harness::TechniqueParams technique_params;
};

ExperimentSetup build_setup(const ParsedConfig& cfg);

TabularDataset load_dataset(const DataConfig& data);

}  // namespace config
}  // namespace augbench
