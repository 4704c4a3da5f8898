#include "activepool/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "activepool/cli/config.hpp"
#include "activepool/cli/dataset_io.hpp"
#include "activepool/cli/records.hpp"
#include "activepool/cli/report.hpp"

namespace activepool::cli {

namespace fs = std::filesystem;

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const RunError& e) {
        err << "error: run failed (seed " << e.seed();
        if (e.iteration() >= 0) err << ", iteration " << e.iteration();
        err << "): " << e.what() << '\n';
        return kExitRuntime;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        // ConfigError and the other validation errors
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
}

GeneratorSpec read_spec(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read generator spec '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed generator spec '" + path.string() + "': " + e.what());
    }
    return generator_spec_from_json(j);
}

}  // namespace

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.preset == opts.spec.has_value())
            throw ConfigError("generate needs exactly one of --preset paper-shape or a spec file");
        if (opts.out.empty()) throw ConfigError("generate needs --out");
        GeneratorSpec spec = opts.preset ? paper_shape_preset() : read_spec(*opts.spec);
        if (opts.seed) spec.seed = *opts.seed;
        spec.validate();
        const DatasetBundle bundle = generate(spec);
        write_dataset(bundle, opts.out, spec);
        out << "wrote " << bundle.train().size() << "/" << bundle.validation().size() << "/"
            << bundle.test().size() << " samples (" << bundle.num_classes() << " classes, d="
            << bundle.feature_dim() << ") to " << opts.out.string() << '\n';
        return kExitOk;
    });
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!opts.config) throw ConfigError("missing --config");
        if (opts.seed && opts.seeds) throw ConfigError("--seed and --seeds are mutually exclusive");
        if (opts.jobs < 1) throw ConfigError("--jobs must be at least 1");
        RunPlan plan = load_plan(*opts.config);
        if (opts.preset) plan.dataset = "preset:paper-shape";
        if (opts.seed) plan.seeds = {*opts.seed};
        if (opts.seeds) plan.seeds = *opts.seeds;
        if (opts.out) plan.out = *opts.out;
        if (plan.seeds.empty()) throw ConfigError("no seeds given");

        const LoadedDataset data = resolve_dataset(plan.dataset, plan.dataset_seed);
        make_dir(plan.out);

        std::vector<StoredRecord> all;
        for (const auto& arm : plan.arms) {
            const SweepResult sweep = run_sweep(data.bundle, arm, plan.seeds, opts.jobs);
            const std::string hash = config_hash(arm);
            const fs::path dir = plan.out / (arm_label(arm) + "-" + hash.substr(0, 8));
            make_dir(dir);
            for (const auto& run : sweep.runs) {
                StoredRecord stored = make_stored(run, data.bundle.classes(), data.fingerprint);
                const std::string stem = "seed-" + std::to_string(run.config.seed);
                write_record(stored, dir / (stem + ".json"));
                write_text(dir / (stem + "-trajectory.csv"), trajectory_csv(stored));
                all.push_back(std::move(stored));
            }
            out << arm_label(arm) << " [" << hash.substr(0, 8) << "] " << sweep.runs.size()
                << " run(s) -> " << dir.string() << '\n';
        }

        const Report report = build_report(std::move(all));
        const std::string text = render_text(report);
        write_text(plan.out / "summary.txt", text);
        write_text(plan.out / "summary.csv", render_csv(report));
        out << '\n' << text;
        return kExitOk;
    });
}

std::vector<fs::path> collect_records(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::recursive_directory_iterator(in)) {
                const auto name = entry.path().filename().string();
                if (entry.is_regular_file() && name.starts_with("seed-") && entry.path().extension() == ".json")
                    found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(in)) {
            files.push_back(in);
        } else {
            throw ConfigError("no such record file or directory '" + in.string() + "'");
        }
    }
    return files;
}

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto files = collect_records(opts.inputs);
        if (files.empty()) throw ConfigError("no run records found");
        std::vector<StoredRecord> records;
        for (const auto& f : files) records.push_back(read_record(f));
        const Report report = build_report(std::move(records));
        const std::string text = render_text(report, opts.show_std);
        if (opts.out) {
            make_dir(*opts.out);
            write_text(*opts.out / "report.txt", text);
            write_text(*opts.out / "report.csv", render_csv(report));
        }
        out << text;
        return kExitOk;
    });
}

}  // namespace activepool::cli
