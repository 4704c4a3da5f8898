#pragma once

#include <optional>
#include <string>
#include <vector>

#include "activepool/cli/records.hpp"

namespace activepool::cli {

// All runs sharing one config hash.
struct ReportColumn {
    std::string label;
    std::string config_hash;
    std::vector<StoredRecord> records;  // ordered by seed
    std::vector<AggregateStat> stats;
};

struct Report {
    std::vector<ClassInfo> classes;
    std::string dataset_fingerprint;
    std::vector<ReportColumn> columns;  // ordered by label, then hash
};

// Groups records into columns. Records that disagree on dataset fingerprint
// or class names are refused with ConfigError.
Report build_report(std::vector<StoredRecord> records);

// Rows: per-class F1, Total (micro), Total (macro), Labeled fraction; cells
// are "mean(std)" percentages.
std::string render_text(const Report& report, bool show_std = true);

// Long format: column,config_hash,runs,row,mean,std (fractions).
std::string render_csv(const Report& report);

// Inverse of format_mean_std: "90.34(0.66)" -> {90.34, 0.66}; std is absent
// when the cell carries only a mean.
struct MeanStdCell {
    double mean = 0.0;
    std::optional<double> std;
};
MeanStdCell parse_mean_std(const std::string& cell);

}  // namespace activepool::cli
