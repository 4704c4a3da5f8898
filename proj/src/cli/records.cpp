#include "activepool/cli/records.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "activepool/cli/dataset_io.hpp"

namespace activepool::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json metrics_json(const MetricsReport& m) {
    json per_class = json::array();
    for (const auto& c : m.per_class)
        per_class.push_back({{"precision", c.precision},
                             {"recall", c.recall},
                             {"f1", c.f1},
                             {"fnr", c.fnr},
                             {"support", c.support}});
    return {{"per_class", per_class},
            {"micro_f1", m.micro_f1},
            {"macro_f1", m.macro_f1},
            {"accuracy", m.accuracy}};
}

MetricsReport metrics_from(const json& j) {
    MetricsReport m;
    for (const auto& c : j.at("per_class"))
        m.per_class.push_back({c.at("precision").get<double>(), c.at("recall").get<double>(),
                               c.at("f1").get<double>(), c.at("fnr").get<double>(),
                               c.at("support").get<std::int64_t>()});
    m.micro_f1 = j.at("micro_f1").get<double>();
    m.macro_f1 = j.at("macro_f1").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    return m;
}

json request_json(const std::optional<AllocationRequest>& r) {
    if (!r) return nullptr;
    return {{"iteration", r->iteration}, {"counts", r->counts}};
}

std::optional<AllocationRequest> request_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return AllocationRequest{j.at("counts").get<std::vector<std::size_t>>(), j.at("iteration").get<int>()};
}

json iteration_json(const IterationRecord& it) {
    return {{"iteration", it.iteration},
            {"appends", it.appends},
            {"train_counts", it.train_counts},
            {"delta", vector_json(it.delta)},
            {"val_fnr", vector_json(it.val_fnr)},
            {"val_metrics", metrics_json(it.val_metrics)},
            {"learner_stopped_epoch", it.learner_stopped_epoch},
            {"pool_remaining", it.pool_remaining},
            {"allocation", request_json(it.allocation)},
            {"shortfall", it.shortfall},
            {"candidates", it.candidates},
            {"blocked_request", request_json(it.blocked_request)}};
}

IterationRecord iteration_from(const json& j) {
    IterationRecord it;
    it.iteration = j.at("iteration").get<int>();
    it.appends = j.at("appends").get<int>();
    it.train_counts = j.at("train_counts").get<std::vector<std::size_t>>();
    it.delta = vector_from(j.at("delta"));
    it.val_fnr = vector_from(j.at("val_fnr"));
    it.val_metrics = metrics_from(j.at("val_metrics"));
    it.learner_stopped_epoch = j.at("learner_stopped_epoch").get<int>();
    it.pool_remaining = j.at("pool_remaining").get<std::vector<std::size_t>>();
    it.allocation = request_from(j.at("allocation"));
    it.shortfall = j.at("shortfall").get<std::vector<std::size_t>>();
    it.candidates = j.at("candidates").get<std::vector<std::size_t>>();
    it.blocked_request = request_from(j.at("blocked_request"));
    return it;
}

StopReason stop_reason_from(const std::string& name) {
    for (auto r : {StopReason::single_round, StopReason::max_iterations, StopReason::pool_exhausted,
                   StopReason::pools_empty})
        if (name == to_string(r)) return r;
    throw ConfigError("unknown stop reason '" + name + "'");
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
    const auto& l = c.learner;
    return {{"arm", to_string(c.arm)},
            {"strategy",
             {{"kind", to_string(c.strategy.kind)},
              {"candidate_count", c.strategy.candidate_count},
              {"select_count", c.strategy.select_count}}},
            {"per_class_initial", c.per_class_initial},
            {"budget", c.budget},
            {"stopping",
             {{"max_iterations", c.stopping.max_iterations},
              {"stop_on_exhaustion", c.stopping.stop_on_exhaustion}}},
            {"sl_fraction", c.sl_fraction ? json(*c.sl_fraction) : json(nullptr)},
            {"learner",
             {{"kind", to_string(l.kind)},
              {"learning_rate", l.learning_rate},
              {"batch_size", l.batch_size},
              {"max_epochs", l.max_epochs},
              {"patience", l.patience},
              {"hidden_units", l.hidden_units},
              {"init_scale", l.init_scale},
              {"warm_start", l.warm_start}}}};
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    const std::string arm = j.at("arm").get<std::string>();
    if (arm != "al" && arm != "sl") throw ConfigError("unknown arm '" + arm + "'");
    c.arm = arm == "sl" ? Arm::sl : Arm::al;
    const auto& s = j.at("strategy");
    c.strategy.kind = strategy_kind_from_string(s.at("kind").get<std::string>());
    c.strategy.candidate_count = s.at("candidate_count").get<std::size_t>();
    c.strategy.select_count = s.at("select_count").get<std::size_t>();
    c.per_class_initial = j.at("per_class_initial").get<std::size_t>();
    c.budget = j.at("budget").get<std::size_t>();
    c.stopping.max_iterations = j.at("stopping").at("max_iterations").get<int>();
    c.stopping.stop_on_exhaustion = j.at("stopping").at("stop_on_exhaustion").get<bool>();
    if (!j.at("sl_fraction").is_null()) c.sl_fraction = j.at("sl_fraction").get<double>();
    const auto& l = j.at("learner");
    c.learner.kind = learner_kind_from_string(l.at("kind").get<std::string>());
    c.learner.learning_rate = l.at("learning_rate").get<double>();
    c.learner.batch_size = l.at("batch_size").get<int>();
    c.learner.max_epochs = l.at("max_epochs").get<int>();
    c.learner.patience = l.at("patience").get<int>();
    c.learner.hidden_units = l.at("hidden_units").get<int>();
    c.learner.init_scale = l.at("init_scale").get<double>();
    c.learner.warm_start = l.at("warm_start").get<bool>();
    return c;
}

std::string config_hash(const ExperimentConfig& config) {
    return fnv1a_hex(config_to_json(config).dump());
}

std::string arm_label(const ExperimentConfig& config) {
    if (config.arm == Arm::sl) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "sl-%g", config.sl_fraction.value_or(0.0) * 100.0);
        return buf;
    }
    return std::string("al-") + to_string(config.strategy.kind);
}

StoredRecord make_stored(RunRecord record, const std::vector<ClassInfo>& classes,
                         const std::string& dataset_fingerprint) {
    StoredRecord s{std::move(record), classes, dataset_fingerprint, {}, {}};
    s.config_hash = config_hash(s.record.config);
    s.label = arm_label(s.record.config);
    return s;
}

json record_to_json(const StoredRecord& s) {
    const RunRecord& r = s.record;
    json classes = json::array();
    for (const auto& c : s.classes) classes.push_back(c.name);
    json iterations = json::array();
    for (const auto& it : r.iterations) iterations.push_back(iteration_json(it));
    return {{"schema_version", kRecordSchemaVersion},
            {"label", s.label},
            {"config_hash", s.config_hash},
            {"dataset_fingerprint", s.dataset_fingerprint},
            {"seed", r.config.seed},
            {"classes", classes},
            {"config", config_to_json(r.config)},
            {"stop_reason", to_string(r.stop_reason)},
            {"train_pool_size", r.train_pool_size},
            {"total_labeled", r.total_labeled},
            {"labeled_fraction_of_train", r.labeled_fraction_of_train},
            {"iterations", iterations},
            {"final_test_metrics", metrics_json(r.final_test_metrics)}};
}

StoredRecord record_from_json(const json& j) {
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kRecordSchemaVersion)
            throw ConfigError("unsupported record schema_version " + std::to_string(version));
        StoredRecord s;
        s.label = j.at("label").get<std::string>();
        s.config_hash = j.at("config_hash").get<std::string>();
        s.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
        const auto names = j.at("classes").get<std::vector<std::string>>();
        for (std::size_t i = 0; i < names.size(); ++i) s.classes.push_back({ClassId{static_cast<int>(i)}, names[i]});
        RunRecord& r = s.record;
        r.config = config_from_json(j.at("config"));
        r.config.seed = j.at("seed").get<std::uint64_t>();
        if (config_hash(r.config) != s.config_hash)
            throw ConfigError("config_hash does not match the embedded config");
        r.stop_reason = stop_reason_from(j.at("stop_reason").get<std::string>());
        r.train_pool_size = j.at("train_pool_size").get<std::size_t>();
        r.total_labeled = j.at("total_labeled").get<std::size_t>();
        r.labeled_fraction_of_train = j.at("labeled_fraction_of_train").get<double>();
        for (const auto& it : j.at("iterations")) r.iterations.push_back(iteration_from(it));
        r.final_test_metrics = metrics_from(j.at("final_test_metrics"));
        if (r.final_test_metrics.per_class.size() != s.classes.size())
            throw ConfigError("final_test_metrics has the wrong number of classes");
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed run record: ") + e.what());
    }
}

void write_record(const StoredRecord& stored, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << record_to_json(stored).dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

StoredRecord read_record(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed run record '" + path.string() + "': " + e.what());
    }
    try {
        return record_from_json(j);
    } catch (const ConfigError& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

std::string trajectory_csv(const StoredRecord& stored) {
    std::string out = "iteration,appends";
    for (const char* group : {"count", "delta", "fnr", "alloc", "shortfall"})
        for (const auto& c : stored.classes) out += std::string(",") + group + "_" + c.name;
    out += ",val_micro_f1,val_macro_f1\n";

    const std::size_t k = stored.classes.size();
    for (const auto& it : stored.record.iterations) {
        out += std::to_string(it.iteration) + "," + std::to_string(it.appends);
        for (std::size_t i = 0; i < k; ++i) out += "," + std::to_string(it.train_counts[i]);
        for (std::size_t i = 0; i < k; ++i) {
            out += ',';
            append_number(out, it.delta[static_cast<Eigen::Index>(i)]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            out += ',';
            append_number(out, it.val_fnr[static_cast<Eigen::Index>(i)]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            out += ',';
            if (it.allocation) out += std::to_string(it.allocation->counts[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            out += ',';
            if (i < it.shortfall.size()) out += std::to_string(it.shortfall[i]);
        }
        out += ',';
        append_number(out, it.val_metrics.micro_f1);
        out += ',';
        append_number(out, it.val_metrics.macro_f1);
        out += '\n';
    }
    return out;
}

}  // namespace activepool::cli
