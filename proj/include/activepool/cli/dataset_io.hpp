#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "activepool/core.hpp"
#include "activepool/synthgen.hpp"

namespace activepool::cli {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Split CSV: header `id,label,f0,...,f{d-1}`; label is the class name;
// reals use the shortest representation that round-trips.
std::string split_to_csv(const DatasetBundle& bundle, const SampleSet& split);

// 64-bit FNV-1a over the three split CSVs, as 16 hex digits.
std::string dataset_fingerprint(const DatasetBundle& bundle);

std::string fnv1a_hex(const std::string& bytes);

nlohmann::json generator_spec_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);

// Writes train.csv, val.csv, test.csv and manifest.json into `dir`.
void write_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir,
                   const std::optional<GeneratorSpec>& spec = std::nullopt);

struct LoadedDataset {
    DatasetBundle bundle;
    std::string fingerprint;
    nlohmann::json manifest;  // null when the directory has no manifest
};

// Reads a dataset directory. Without a manifest the classes are the sorted
// distinct labels; with one, counts, dimension and fingerprint must match.
LoadedDataset read_dataset(const std::filesystem::path& dir);

// `preset:paper-shape` or a dataset directory.
LoadedDataset resolve_dataset(const std::string& source, std::uint64_t preset_seed);

}  // namespace activepool::cli
