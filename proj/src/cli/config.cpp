#include "activepool/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace activepool::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(item);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
    return value;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    if (!text.empty() && text.front() == '-')
        throw ConfigError("config key '" + key + "' must be non-negative");
    return parse_number<std::size_t>(key, text);
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "dataset",       "dataset_seed", "arm",          "strategy",   "per_class_initial",
        "budget",        "max_iterations", "stop_on_exhaustion", "entropy_candidates",
        "sl_fraction",   "learner",      "learning_rate", "batch_size", "max_epochs",
        "patience",      "hidden_units", "init_scale",   "warm_start", "seeds",
        "out"};
    return keys;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        if (!known_keys().contains(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!kv.emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return kv;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_list(text)) {
        if (!s.empty() && s.front() == '-') throw ConfigError("seeds must be non-negative");
        seeds.push_back(parse_number<std::uint64_t>("seeds", s));
    }
    return seeds;
}

RunPlan plan_from_key_values(const KeyValues& kv) {
    if (kv.contains("strategy") && kv.contains("sl_fraction"))
        throw ConfigError("conflicting fields 'strategy' and 'sl_fraction': "
                          "strategy selects an active-learning arm, sl_fraction a supervised arm");

    auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    RunPlan plan;
    if (auto v = get("dataset")) plan.dataset = *v;
    if (auto v = get("dataset_seed")) plan.dataset_seed = parse_number<std::uint64_t>("dataset_seed", *v);
    if (auto v = get("seeds")) plan.seeds = parse_seed_list(*v);
    if (auto v = get("out")) plan.out = *v;

    ExperimentConfig base;
    const std::string arm = get("arm") ? *get("arm") : std::string(get("sl_fraction") ? "sl" : "al");
    if (arm == "al") {
        base.arm = Arm::al;
    } else if (arm == "sl") {
        base.arm = Arm::sl;
    } else {
        throw ConfigError("config key 'arm': expected al or sl, got '" + arm + "'");
    }
    if (base.arm == Arm::al && get("sl_fraction"))
        throw ConfigError("conflicting fields 'arm = al' and 'sl_fraction'");
    if (base.arm == Arm::sl && !get("sl_fraction"))
        throw ConfigError("arm 'sl' requires 'sl_fraction'");

    if (auto v = get("strategy")) base.strategy.kind = strategy_kind_from_string(*v);
    if (auto v = get("per_class_initial")) base.per_class_initial = parse_count("per_class_initial", *v);
    if (auto v = get("budget")) base.budget = parse_count("budget", *v);
    if (auto v = get("max_iterations")) {
        const auto j = parse_count("max_iterations", *v);
        base.stopping.max_iterations = static_cast<int>(j);
    }
    if (auto v = get("stop_on_exhaustion"))
        base.stopping.stop_on_exhaustion = parse_bool("stop_on_exhaustion", *v);
    if (auto v = get("entropy_candidates")) {
        if (base.strategy.kind != StrategyKind::entropy_topk)
            throw ConfigError("conflicting fields 'entropy_candidates' and 'strategy = " +
                              std::string(to_string(base.strategy.kind)) + "'");
        base.strategy.candidate_count = parse_count("entropy_candidates", *v);
    }
    if (base.strategy.kind == StrategyKind::entropy_topk) {
        if (!get("entropy_candidates"))
            throw ConfigError("strategy 'entropy_topk' requires 'entropy_candidates'");
        base.strategy.select_count = base.budget;
    }

    auto& lc = base.learner;
    if (auto v = get("learner")) lc.kind = learner_kind_from_string(*v);
    if (auto v = get("learning_rate")) lc.learning_rate = parse_number<double>("learning_rate", *v);
    if (auto v = get("batch_size")) lc.batch_size = static_cast<int>(parse_count("batch_size", *v));
    if (auto v = get("max_epochs")) lc.max_epochs = static_cast<int>(parse_count("max_epochs", *v));
    if (auto v = get("patience")) lc.patience = static_cast<int>(parse_count("patience", *v));
    if (auto v = get("hidden_units")) lc.hidden_units = static_cast<int>(parse_count("hidden_units", *v));
    if (auto v = get("init_scale")) lc.init_scale = parse_number<double>("init_scale", *v);
    if (auto v = get("warm_start")) lc.warm_start = parse_bool("warm_start", *v);

    if (base.arm == Arm::sl) {
        for (const auto& f : split_list(*get("sl_fraction"))) {
            ExperimentConfig cfg = base;
            cfg.sl_fraction = parse_number<double>("sl_fraction", f);
            cfg.validate();
            plan.arms.push_back(cfg);
        }
    } else {
        base.validate();
        plan.arms.push_back(base);
    }
    return plan;
}

RunPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return plan_from_key_values(parse_key_values(ss.str()));
}

}  // namespace activepool::cli
