#include "activepool/core.hpp"

#include <cmath>
#include <iterator>
#include <unordered_set>

namespace activepool {

namespace {

void validate_split(const SampleSet& split, const char* name, int num_classes, int& dim,
                    std::unordered_set<std::string>& seen_ids) {
    for (const auto& s : split) {
        if (s.label.index < 0 || s.label.index >= num_classes)
            throw ConfigError(std::string(name) + " sample '" + s.id + "' has unregistered label " +
                              std::to_string(s.label.index));
        if (s.features.size() < 1)
            throw ConfigError(std::string(name) + " sample '" + s.id + "' has no features");
        if (dim == 0) dim = static_cast<int>(s.features.size());
        if (s.features.size() != dim)
            throw ConfigError(std::string(name) + " sample '" + s.id + "' has dimension " +
                              std::to_string(s.features.size()) + ", expected " +
                              std::to_string(dim));
        if (!s.features.allFinite())
            throw ConfigError(std::string(name) + " sample '" + s.id +
                              "' contains non-finite features");
        if (!seen_ids.insert(s.id).second)
            throw ConfigError("sample id '" + s.id + "' appears more than once across splits");
    }
}

}  // namespace

DatasetBundle::DatasetBundle(std::vector<ClassInfo> classes, SampleSet train,
                             SampleSet validation, SampleSet test)
    : classes_(std::move(classes)),
      train_(std::move(train)),
      validation_(std::move(validation)),
      test_(std::move(test)) {
    if (classes_.size() < 2) throw ConfigError("a dataset needs at least two classes");
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].id.index != static_cast<int>(i))
            throw ConfigError("class '" + classes_[i].name + "' is registered out of order");
    }
    std::unordered_set<std::string> ids;
    int dim = 0;
    validate_split(train_, "train", num_classes(), dim, ids);
    validate_split(validation_, "validation", num_classes(), dim, ids);
    validate_split(test_, "test", num_classes(), dim, ids);
    feature_dim_ = dim;
}

std::vector<std::size_t> DatasetBundle::class_counts(const SampleSet& split) const {
    std::vector<std::size_t> counts(classes_.size(), 0);
    for (const auto& s : split) ++counts[s.label.index];
    return counts;
}

void TrainingSet::append(Sample sample) {
    if (sample.label.index < 0 || sample.label.index >= num_classes())
        throw ConfigError("cannot append sample '" + sample.id + "': unknown class");
    ++counts_[sample.label.index];
    samples_.push_back(std::move(sample));
}

void TrainingSet::append(SampleSet samples) {
    samples_.reserve(samples_.size() + samples.size());
    for (auto& s : samples) append(std::move(s));
}

void ClassPools::check(ClassId c) const {
    if (c.index < 0 || c.index >= num_classes())
        throw ConfigError("unknown class index " + std::to_string(c.index));
}

std::size_t ClassPools::remaining(ClassId c) const {
    check(c);
    return pools_[c.index].size();
}

std::vector<std::size_t> ClassPools::remaining() const {
    std::vector<std::size_t> out;
    out.reserve(pools_.size());
    for (const auto& p : pools_) out.push_back(p.size());
    return out;
}

std::size_t ClassPools::total_remaining() const {
    std::size_t total = 0;
    for (const auto& p : pools_) total += p.size();
    return total;
}

DrawResult ClassPools::draw(ClassId c, std::size_t n) {
    check(c);
    auto& pool = pools_[c.index];
    const std::size_t take = std::min(n, pool.size());
    DrawResult out;
    out.requested = n;
    out.samples.reserve(take);
    for (std::size_t k = 0; k < take; ++k) {
        out.samples.push_back(std::move(pool.back()));
        pool.pop_back();
    }
    return out;
}

void ClassPools::give_back(SampleSet samples, RandomSource& rng) {
    for (auto& s : samples) {
        check(s.label);
        auto& pool = pools_[s.label.index];
        pool.push_back(std::move(s));
        // Inside-out Fisher-Yates step keeps the stored order a uniform permutation.
        const auto j = static_cast<std::size_t>(rng.uniform_index(pool.size()));
        std::swap(pool[j], pool.back());
    }
}

void ClassPools::stock(ClassId c, SampleSet samples) {
    check(c);
    auto& pool = pools_[c.index];
    pool.insert(pool.end(), std::make_move_iterator(samples.begin()),
                std::make_move_iterator(samples.end()));
}

std::span<const Sample> ClassPools::view(ClassId c) const {
    check(c);
    return pools_[c.index];
}

InitialSplit split_initial(const SampleSet& train, int num_classes, std::size_t per_class_initial,
                           RandomSource& rng) {
    if (train.empty()) throw ConfigError("split_initial: the training collection is empty");
    if (num_classes < 2) throw ConfigError("split_initial: need at least two classes");

    std::vector<SampleSet> by_class(num_classes);
    for (const auto& s : train) {
        if (s.label.index < 0 || s.label.index >= num_classes)
            throw ConfigError("split_initial: sample '" + s.id + "' has an unknown class");
        by_class[s.label.index].push_back(s);
    }

    InitialSplit out{TrainingSet(num_classes), ClassPools(num_classes), {}};
    for (int c = 0; c < num_classes; ++c) {
        auto& members = by_class[c];
        rng.shuffle(std::span<Sample>(members));
        const std::size_t take = std::min(per_class_initial, members.size());
        if (take < per_class_initial) out.short_classes.push_back(ClassId{c});
        for (std::size_t k = 0; k < take; ++k) out.training.append(std::move(members[k]));
        members.erase(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
        out.pools.stock(ClassId{c}, std::move(members));
    }
    return out;
}

DrawResult draw_from_pool(ClassPools& pools, ClassId c, std::size_t n) { return pools.draw(c, n); }

Eigen::VectorXd class_balance(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto n : counts) total += n;
    if (total == 0) throw UndefinedBalanceError("class balance of an empty training set is undefined");
    Eigen::VectorXd delta(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
        delta[static_cast<Eigen::Index>(i)] =
            static_cast<double>(counts[i]) / static_cast<double>(total);
    return delta;
}

}  // namespace activepool
