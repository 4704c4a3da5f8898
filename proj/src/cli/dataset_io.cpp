#include "activepool/cli/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace activepool::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSplitFiles[] = {"train.csv", "val.csv", "test.csv"};

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct RawRow {
    std::string id;
    std::string label;
    Eigen::VectorXd features;
};

std::vector<RawRow> read_split(const fs::path& path, int& dim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("'" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_fields(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "label")
        throw ConfigError("'" + path.string() + "': header must be id,label,f0,...");
    const int d = static_cast<int>(header.size()) - 2;
    for (int f = 0; f < d; ++f)
        if (header[static_cast<std::size_t>(f + 2)] != "f" + std::to_string(f))
            throw ConfigError("'" + path.string() + "': feature column " + std::to_string(f) +
                              " must be named f" + std::to_string(f));
    if (dim != 0 && dim != d)
        throw ConfigError("'" + path.string() + "' has " + std::to_string(d) +
                          " features, other splits have " + std::to_string(dim));
    dim = d;

    std::vector<RawRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != d + 2)
            throw ConfigError("'" + path.string() + "' line " + std::to_string(lineno) +
                              ": expected " + std::to_string(d + 2) + " fields");
        RawRow row{fields[0], fields[1], Eigen::VectorXd(d)};
        for (int f = 0; f < d; ++f) {
            const auto& text = fields[static_cast<std::size_t>(f + 2)];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                throw ConfigError("'" + path.string() + "' line " + std::to_string(lineno) +
                                  ": cannot parse '" + text + "'");
            row.features[f] = v;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json counts_json(const DatasetBundle& bundle, const SampleSet& split) {
    return bundle.class_counts(split);
}

}  // namespace

std::string split_to_csv(const DatasetBundle& bundle, const SampleSet& split) {
    std::string out = "id,label";
    for (int f = 0; f < bundle.feature_dim(); ++f) out += ",f" + std::to_string(f);
    out += '\n';
    for (const auto& s : split) {
        out += s.id;
        out += ',';
        out += bundle.classes()[static_cast<std::size_t>(s.label.index)].name;
        for (Eigen::Index f = 0; f < s.features.size(); ++f) {
            out += ',';
            append_double(out, s.features[f]);
        }
        out += '\n';
    }
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string dataset_fingerprint(const DatasetBundle& bundle) {
    return fnv1a_hex(split_to_csv(bundle, bundle.train()) + split_to_csv(bundle, bundle.validation()) +
                     split_to_csv(bundle, bundle.test()));
}

json generator_spec_to_json(const GeneratorSpec& spec) {
    json j;
    j["class_names"] = spec.class_names;
    j["feature_dim"] = spec.feature_dim;
    j["train_counts"] = spec.train_counts;
    j["val_counts"] = spec.val_counts;
    j["test_counts"] = spec.test_counts;
    if (spec.class_means) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < spec.class_means->rows(); ++r) {
            std::vector<double> row(spec.class_means->cols());
            for (Eigen::Index c = 0; c < spec.class_means->cols(); ++c) row[c] = (*spec.class_means)(r, c);
            rows.push_back(row);
        }
        j["class_means"] = rows;
    } else {
        j["placement_scale"] = spec.placement_scale;
    }
    j["class_sigmas"] = spec.class_sigmas;
    json pairs = json::array();
    for (const auto& p : spec.overlap_pairs) pairs.push_back({{"from", p.from}, {"to", p.to}, {"weight", p.weight}});
    j["overlap_pairs"] = pairs;
    j["seed"] = spec.seed;
    return j;
}

GeneratorSpec generator_spec_from_json(const json& j) {
    try {
        GeneratorSpec spec;
        spec.class_names = j.at("class_names").get<std::vector<std::string>>();
        spec.feature_dim = j.at("feature_dim").get<int>();
        spec.train_counts = j.at("train_counts").get<std::vector<std::size_t>>();
        spec.val_counts = j.at("val_counts").get<std::vector<std::size_t>>();
        spec.test_counts = j.at("test_counts").get<std::vector<std::size_t>>();
        if (j.contains("class_means")) {
            const auto rows = j.at("class_means").get<std::vector<std::vector<double>>>();
            Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), spec.feature_dim);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<int>(rows[r].size()) != spec.feature_dim)
                    throw ConfigError("generator spec: class_means row has the wrong length");
                for (int c = 0; c < spec.feature_dim; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
            }
            spec.class_means = m;
        }
        if (j.contains("placement_scale")) spec.placement_scale = j.at("placement_scale").get<double>();
        spec.class_sigmas = j.at("class_sigmas").get<std::vector<double>>();
        if (j.contains("overlap_pairs"))
            for (const auto& p : j.at("overlap_pairs"))
                spec.overlap_pairs.push_back({p.at("from").get<int>(), p.at("to").get<int>(), p.at("weight").get<double>()});
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("generator spec: ") + e.what());
    }
}

void write_dataset(const DatasetBundle& bundle, const fs::path& dir,
                   const std::optional<GeneratorSpec>& spec) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

    const SampleSet* splits[] = {&bundle.train(), &bundle.validation(), &bundle.test()};
    for (int k = 0; k < 3; ++k) {
        const fs::path path = dir / kSplitFiles[k];
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + path.string() + "'");
        out << split_to_csv(bundle, *splits[k]);
        if (!out) throw IoError("failed writing '" + path.string() + "'");
    }

    json manifest;
    manifest["format"] = "activepool-dataset";
    manifest["version"] = 1;
    json names = json::array();
    for (const auto& c : bundle.classes()) names.push_back(c.name);
    manifest["classes"] = names;
    manifest["feature_dim"] = bundle.feature_dim();
    manifest["counts"] = {{"train", counts_json(bundle, bundle.train())},
                          {"val", counts_json(bundle, bundle.validation())},
                          {"test", counts_json(bundle, bundle.test())}};
    manifest["generator"] = spec ? generator_spec_to_json(*spec) : json(nullptr);
    manifest["fingerprint"] = dataset_fingerprint(bundle);

    const fs::path path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << manifest.dump(2) << '\n';
}

LoadedDataset read_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("dataset directory '" + dir.string() + "' not found");
    json manifest = nullptr;
    const fs::path manifest_path = dir / "manifest.json";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        try {
            manifest = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("malformed manifest '" + manifest_path.string() + "': " + e.what());
        }
    }

    int dim = 0;
    std::vector<RawRow> raw[3];
    for (int k = 0; k < 3; ++k) raw[k] = read_split(dir / kSplitFiles[k], dim);

    std::vector<std::string> names;
    if (!manifest.is_null()) {
        names = manifest.at("classes").get<std::vector<std::string>>();
    } else {
        std::set<std::string> distinct;
        for (const auto& split : raw)
            for (const auto& row : split) distinct.insert(row.label);
        names.assign(distinct.begin(), distinct.end());
    }
    std::map<std::string, int> index;
    std::vector<ClassInfo> classes;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!index.emplace(names[i], static_cast<int>(i)).second)
            throw ConfigError("duplicate class name '" + names[i] + "'");
        classes.push_back({ClassId{static_cast<int>(i)}, names[i]});
    }

    SampleSet splits[3];
    for (int k = 0; k < 3; ++k) {
        for (auto& row : raw[k]) {
            const auto it = index.find(row.label);
            if (it == index.end())
                throw ConfigError(std::string(kSplitFiles[k]) + ": unregistered label '" + row.label + "'");
            splits[k].push_back(Sample{std::move(row.id), std::move(row.features), ClassId{it->second}});
        }
    }

    LoadedDataset out{DatasetBundle(std::move(classes), std::move(splits[0]), std::move(splits[1]),
                                    std::move(splits[2])),
                      {}, manifest};
    out.fingerprint = dataset_fingerprint(out.bundle);
    if (!manifest.is_null()) {
        if (manifest.value("feature_dim", -1) != out.bundle.feature_dim())
            throw ConfigError("dataset files do not match the manifest's feature_dim");
        const auto& counts = manifest.at("counts");
        if (counts.at("train") != counts_json(out.bundle, out.bundle.train()) ||
            counts.at("val") != counts_json(out.bundle, out.bundle.validation()) ||
            counts.at("test") != counts_json(out.bundle, out.bundle.test()))
            throw ConfigError("dataset files do not match the manifest's class counts");
        if (manifest.value("fingerprint", std::string()) != out.fingerprint)
            throw ConfigError("dataset files do not match the manifest fingerprint");
    }
    return out;
}

LoadedDataset resolve_dataset(const std::string& source, std::uint64_t preset_seed) {
    if (source == "preset:paper-shape") {
        const GeneratorSpec spec = paper_shape_preset(preset_seed);
        LoadedDataset out{generate(spec), {}, nullptr};
        out.fingerprint = dataset_fingerprint(out.bundle);
        return out;
    }
    if (source.starts_with("preset:"))
        throw ConfigError("unknown dataset preset '" + source + "' (expected preset:paper-shape)");
    return read_dataset(source);
}

}  // namespace activepool::cli
