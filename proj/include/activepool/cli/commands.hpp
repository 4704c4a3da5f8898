#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace activepool::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct GenerateOptions {
    bool preset = false;                         // --preset paper-shape
    std::optional<std::filesystem::path> spec;   // generator spec JSON
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
};

struct RunOptions {
    std::optional<std::filesystem::path> config;
    bool preset = false;  // overrides the config's dataset with the preset
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<std::uint64_t>> seeds;
    int jobs = 1;
    std::optional<std::filesystem::path> out;
};

struct ReportOptions {
    std::vector<std::filesystem::path> inputs;  // record files or directories
    bool show_std = true;
    std::optional<std::filesystem::path> out;
};

// Each command returns an exit code; diagnostics go to `err`.
int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err);

// Record files under a directory, recursively, in path order.
std::vector<std::filesystem::path> collect_records(const std::vector<std::filesystem::path>& inputs);

}  // namespace activepool::cli
