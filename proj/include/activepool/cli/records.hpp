#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "activepool/engine.hpp"

namespace activepool::cli {

inline constexpr int kRecordSchemaVersion = 1;

nlohmann::json config_to_json(const ExperimentConfig& config);  // seed excluded
ExperimentConfig config_from_json(const nlohmann::json& j);

// FNV-1a of the canonical config JSON; runs differing only in seed share it.
std::string config_hash(const ExperimentConfig& config);

// Column name for reports: "al-fnr_proportional", "sl-20", ...
std::string arm_label(const ExperimentConfig& config);

// A RunRecord together with the context needed to report on it alone.
struct StoredRecord {
    RunRecord record;
    std::vector<ClassInfo> classes;
    std::string dataset_fingerprint;
    std::string config_hash;
    std::string label;
};

nlohmann::json record_to_json(const StoredRecord& stored);
StoredRecord record_from_json(const nlohmann::json& j);

StoredRecord make_stored(RunRecord record, const std::vector<ClassInfo>& classes,
                         const std::string& dataset_fingerprint);

void write_record(const StoredRecord& stored, const std::filesystem::path& path);
StoredRecord read_record(const std::filesystem::path& path);

// One row per training round: counts, delta, FNR, allocation, shortfall and
// validation micro/macro F1 per class.
std::string trajectory_csv(const StoredRecord& stored);

}  // namespace activepool::cli
