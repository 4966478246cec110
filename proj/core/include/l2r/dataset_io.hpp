#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "l2r/datagen.hpp"

namespace l2r {

// One JSON object per line: {"origin","destination","interval","edges":[ids]}.
std::string serialize_routes_jsonl(std::span<const Route> routes);
std::vector<Route> parse_routes_jsonl(const std::string& text, const RoadNetwork& net);

std::string serialize_manifest(const GenerationConfig& config);
GenerationConfig parse_manifest(const std::string& text);

// Directory layout: roadnet.json, traffic.csv, routes.jsonl, manifest.json.
void save_dataset(const SyntheticDataset& dataset, const std::filesystem::path& dir);
SyntheticDataset load_dataset(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace l2r
