#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "activepool/engine.hpp"

namespace activepool::cli {

// Parsed experiment file. The format is one `key = value` per line; `#`
// starts a comment; lists are comma separated. Keys:
//
//   dataset            directory with train/val/test CSVs, or preset:paper-shape
//   dataset_seed       generator seed for a preset dataset (default 7)
//   arm                al | sl
//   strategy           fnr_proportional | entropy_topk | proportional_random | none
//   per_class_initial  size of X_0 per class
//   budget             samples appended per iteration (S)
//   max_iterations     J; 0 disables the cap
//   stop_on_exhaustion true | false
//   entropy_candidates candidates drawn per iteration by entropy_topk
//   sl_fraction        one fraction or a list, e.g. 0.2,0.4,0.6,0.8,1.0
//   learner            softmax_linear | mlp
//   learning_rate, batch_size, max_epochs, patience, hidden_units,
//   init_scale, warm_start
//   seeds              list of run seeds
//   out                output directory
struct RunPlan {
    std::string dataset = "preset:paper-shape";
    std::uint64_t dataset_seed = 7;
    // One entry per arm to execute; seeds are filled in per run.
    std::vector<ExperimentConfig> arms;
    std::vector<std::uint64_t> seeds = {1};
    std::filesystem::path out = "results";
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
RunPlan plan_from_key_values(const KeyValues& kv);
RunPlan load_plan(const std::filesystem::path& path);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace activepool::cli
