#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "activepool/random.hpp"

namespace activepool {

// Raised for invalid configuration, malformed inputs and unknown classes.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UndefinedBalanceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ClassId {
    int index = 0;
    auto operator<=>(const ClassId&) const = default;
};

struct ClassInfo {
    ClassId id;
    std::string name;
};

struct Sample {
    std::string id;
    Eigen::VectorXd features;
    ClassId label;
};

using SampleSet = std::vector<Sample>;

// Immutable train / validation / test splits sharing one feature dimension.
class DatasetBundle {
public:
    DatasetBundle() = default;
    // Validates labels, dimensions, finiteness and split disjointness.
    DatasetBundle(std::vector<ClassInfo> classes, SampleSet train, SampleSet validation,
                  SampleSet test);

    const std::vector<ClassInfo>& classes() const { return classes_; }
    int num_classes() const { return static_cast<int>(classes_.size()); }
    int feature_dim() const { return feature_dim_; }
    const SampleSet& train() const { return train_; }
    const SampleSet& validation() const { return validation_; }
    const SampleSet& test() const { return test_; }

    std::vector<std::size_t> class_counts(const SampleSet& split) const;

private:
    std::vector<ClassInfo> classes_;
    SampleSet train_;
    SampleSet validation_;
    SampleSet test_;
    int feature_dim_ = 0;
};

// Labeled training set X_j. Grows by append only.
class TrainingSet {
public:
    explicit TrainingSet(int num_classes = 0) : counts_(num_classes, 0) {}

    void append(Sample sample);
    void append(SampleSet samples);

    const SampleSet& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    int num_classes() const { return static_cast<int>(counts_.size()); }
    const std::vector<std::size_t>& counts() const { return counts_; }

    int iteration() const { return iteration_; }
    void set_iteration(int j) { iteration_ = j; }

private:
    SampleSet samples_;
    std::vector<std::size_t> counts_;
    int iteration_ = 0;
};

struct DrawResult {
    SampleSet samples;
    std::size_t requested = 0;
    std::size_t shortfall() const { return requested - samples.size(); }
};

// Per-class reservoirs of samples not yet labeled into the training set.
// Each reservoir is shuffled once when stocked; draws then take from the
// back of the stored order, so every draw is uniform without replacement.
class ClassPools {
public:
    explicit ClassPools(int num_classes = 0) : pools_(num_classes) {}

    int num_classes() const { return static_cast<int>(pools_.size()); }
    std::size_t remaining(ClassId c) const;
    std::vector<std::size_t> remaining() const;
    std::size_t total_remaining() const;
    bool all_empty() const { return total_remaining() == 0; }

    // Takes the next min(n, remaining) samples in draw order.
    DrawResult draw(ClassId c, std::size_t n);

    // Puts samples back into their class reservoirs at uniformly random
    // positions among the undrawn stock.
    void give_back(SampleSet samples, RandomSource& rng);

    // Adds samples without reshuffling; used when building pools.
    void stock(ClassId c, SampleSet samples);

    std::span<const Sample> view(ClassId c) const;

private:
    void check(ClassId c) const;
    std::vector<SampleSet> pools_;
};

struct InitialSplit {
    TrainingSet training;
    ClassPools pools;
    // Classes that had fewer than per_class_initial samples.
    std::vector<ClassId> short_classes;
};

// Splits the training collection into X_0 (up to per_class_initial uniformly
// random samples per class) and the per-class pools holding the rest.
InitialSplit split_initial(const SampleSet& train, int num_classes, std::size_t per_class_initial,
                           RandomSource& rng);

DrawResult draw_from_pool(ClassPools& pools, ClassId c, std::size_t n);

// delta_i = count_i / total.
Eigen::VectorXd class_balance(std::span<const std::size_t> counts);
inline Eigen::VectorXd class_balance(const TrainingSet& ts) { return class_balance(ts.counts()); }

}  // namespace activepool
