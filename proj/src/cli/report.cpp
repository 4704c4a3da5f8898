#include "activepool/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <regex>

namespace activepool::cli {

namespace {

const char* const kTextRows[] = {"Total (micro)", "Total (macro)", "Labeled fraction"};

const AggregateStat& find_stat(const ReportColumn& col, const std::string& name) {
    for (const auto& s : col.stats)
        if (s.name == name) return s;
    throw std::logic_error("missing aggregate row '" + name + "'");
}

std::string pad(const std::string& s, std::size_t width, bool left) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return left ? s + fill : fill + s;
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

Report build_report(std::vector<StoredRecord> records) {
    if (records.empty()) throw ConfigError("report needs at least one run record");
    Report report;
    report.classes = records.front().classes;
    report.dataset_fingerprint = records.front().dataset_fingerprint;

    std::map<std::pair<std::string, std::string>, ReportColumn> groups;
    for (auto& r : records) {
        if (r.dataset_fingerprint != report.dataset_fingerprint)
            throw ConfigError("records come from different datasets (fingerprint " + r.dataset_fingerprint +
                              " vs " + report.dataset_fingerprint + ")");
        bool same_classes = r.classes.size() == report.classes.size();
        for (std::size_t i = 0; same_classes && i < r.classes.size(); ++i)
            same_classes = r.classes[i].name == report.classes[i].name;
        if (!same_classes) throw ConfigError("records disagree on class names");
        auto& col = groups[{r.label, r.config_hash}];
        col.label = r.label;
        col.config_hash = r.config_hash;
        col.records.push_back(std::move(r));
    }
    for (auto& [key, col] : groups) {
        std::sort(col.records.begin(), col.records.end(),
                  [](const StoredRecord& a, const StoredRecord& b) { return a.record.config.seed < b.record.config.seed; });
        for (std::size_t i = 1; i < col.records.size(); ++i)
            if (col.records[i].record.config.seed == col.records[i - 1].record.config.seed)
                throw ConfigError("duplicate record for " + col.label + " seed " +
                                  std::to_string(col.records[i].record.config.seed));
        std::vector<RunRecord> runs;
        for (const auto& r : col.records) runs.push_back(r.record);
        col.stats = aggregate(runs, report.classes);
        report.columns.push_back(std::move(col));
    }
    return report;
}

std::string render_text(const Report& report, bool show_std) {
    std::vector<std::string> row_names;
    for (const auto& c : report.classes) row_names.push_back(c.name);
    for (const char* r : kTextRows) row_names.emplace_back(r);

    // Two header lines: label and short config hash, so same-label columns
    // with different configs stay distinguishable.
    std::vector<std::vector<std::string>> cells(row_names.size() + 3);
    cells[0].push_back("");
    cells[1].push_back("");
    cells[2].push_back("runs");
    for (std::size_t r = 0; r < row_names.size(); ++r) cells[r + 3].push_back(row_names[r]);
    for (const auto& col : report.columns) {
        cells[0].push_back(col.label);
        cells[1].push_back(col.config_hash.substr(0, 8));
        cells[2].push_back(std::to_string(col.records.size()));
        for (std::size_t r = 0; r < row_names.size(); ++r) {
            const auto& s = find_stat(col, row_names[r]);
            cells[r + 3].push_back(format_mean_std(s.mean, s.std, show_std));
        }
    }

    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());

    std::string out = "F1 per class on the test split, mean(std) in percent\n";
    out += "dataset " + report.dataset_fingerprint + "\n\n";
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) line += "  ";
            line += pad(row[c], widths[c], c == 0);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

std::string render_csv(const Report& report) {
    std::string out = "column,config_hash,runs,row,mean,std\n";
    for (const auto& col : report.columns) {
        for (const auto& s : col.stats) {
            out += col.label + ',' + col.config_hash + ',' + std::to_string(s.runs) + ',' + s.name + ',';
            append_number(out, s.mean);
            out += ',';
            append_number(out, s.std);
            out += '\n';
        }
    }
    return out;
}

MeanStdCell parse_mean_std(const std::string& cell) {
    static const std::regex pattern(R"(^(-?\d+\.\d{2})(?:\((\d+\.\d{2})\))?$)");
    std::smatch m;
    if (!std::regex_match(cell, m, pattern)) throw ConfigError("not a mean(std) cell: '" + cell + "'");
    MeanStdCell out;
    out.mean = std::stod(m[1].str());
    if (m[2].matched) out.std = std::stod(m[2].str());
    return out;
}

}  // namespace activepool::cli
