#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "activepool/core.hpp"
#include "activepool/learner.hpp"
#include "activepool/metrics.hpp"
#include "activepool/strategy.hpp"

namespace activepool {

enum class Arm { al, sl };

const char* to_string(Arm arm);

// max_iterations = 0 disables the iteration cap.
struct StoppingRule {
    int max_iterations = 5;
    bool stop_on_exhaustion = false;

    void validate() const;
};

struct ExperimentConfig {
    Arm arm = Arm::al;
    StrategyConfig strategy;
    std::size_t per_class_initial = 0;
    std::size_t budget = 0;
    StoppingRule stopping;
    std::optional<double> sl_fraction;
    LearnerConfig learner;
    std::uint64_t seed = 0;

    void validate() const;
};

// One training round on X_j. `iteration` is the round index j; `appends` is
// the number of append steps that produced X_j (equal to j).
struct IterationRecord {
    int iteration = 0;
    int appends = 0;
    std::vector<std::size_t> train_counts;
    Eigen::VectorXd delta;
    Eigen::VectorXd val_fnr;
    MetricsReport val_metrics;
    int learner_stopped_epoch = 0;
    // Pool stock seen by the query step, before drawing.
    std::vector<std::size_t> pool_remaining;
    // Request for the next append; absent on the terminal round.
    std::optional<AllocationRequest> allocation;
    std::vector<std::size_t> shortfall;
    // entropy_topk only: candidates drawn per class.
    std::vector<std::size_t> candidates;
    // Set when the run stopped because this request could not be met.
    std::optional<AllocationRequest> blocked_request;
};

enum class StopReason { single_round, max_iterations, pool_exhausted, pools_empty };

const char* to_string(StopReason reason);

struct RunRecord {
    ExperimentConfig config;
    std::vector<IterationRecord> iterations;
    MetricsReport final_test_metrics;
    std::size_t train_pool_size = 0;  // |X|
    std::size_t total_labeled = 0;
    double labeled_fraction_of_train = 0.0;
    StopReason stop_reason = StopReason::single_round;
};

// Raised when a run fails; carries the seed and training round.
class RunError : public std::runtime_error {
public:
    RunError(const std::string& what, std::uint64_t seed, int iteration)
        : std::runtime_error(what), seed_(seed), iteration_(iteration) {}
    std::uint64_t seed() const { return seed_; }
    int iteration() const { return iteration_; }

private:
    std::uint64_t seed_;
    int iteration_;
};

using ProgressFn = std::function<void(const ExperimentConfig&, const IterationRecord&)>;

MetricsReport evaluate(const TrainedModel& model, const SampleSet& samples, int num_classes);

// Iterate train -> evaluate on validation -> allocate -> draw -> append until
// the stopping rule fires; the terminal model is scored once on the test split.
RunRecord run_active_learning(const DatasetBundle& bundle, const ExperimentConfig& config,
                              const ProgressFn& progress = {});

// Single training round on a stratified fraction of the training split.
RunRecord run_supervised(const DatasetBundle& bundle, double fraction,
                         const ExperimentConfig& config, const ProgressFn& progress = {});

// Dispatches on config.arm.
RunRecord run_arm(const DatasetBundle& bundle, const ExperimentConfig& config,
                  const ProgressFn& progress = {});

struct AggregateStat {
    std::string name;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single run
    std::size_t runs = 0;
};

// Per-class F1, micro/macro F1, accuracy and labeled fraction across runs.
std::vector<AggregateStat> aggregate(std::span<const RunRecord> runs,
                                     const std::vector<ClassInfo>& classes);

struct SweepResult {
    std::vector<RunRecord> runs;  // in seed order
    std::vector<AggregateStat> stats;
};

// Runs the configured arm once per seed on up to `jobs` threads.
SweepResult run_sweep(const DatasetBundle& bundle, const ExperimentConfig& config,
                      std::span<const std::uint64_t> seeds, int jobs = 1,
                      const ProgressFn& progress = {});

// Fractions rendered as percentages with two decimals: "90.34(0.66)".
std::string format_mean_std(double mean, double std, bool show_std = true);

}  // namespace activepool
