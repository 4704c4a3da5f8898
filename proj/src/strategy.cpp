#include "activepool/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace activepool {

std::size_t AllocationRequest::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

const char* to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::fnr_proportional: return "fnr_proportional";
        case StrategyKind::entropy_topk: return "entropy_topk";
        case StrategyKind::proportional_random: return "proportional_random";
        case StrategyKind::none: return "none";
    }
    return "none";
}

StrategyKind strategy_kind_from_string(const std::string& name) {
    if (name == "fnr_proportional") return StrategyKind::fnr_proportional;
    if (name == "entropy_topk") return StrategyKind::entropy_topk;
    if (name == "proportional_random") return StrategyKind::proportional_random;
    if (name == "none") return StrategyKind::none;
    throw ConfigError("unknown strategy '" + name +
                      "' (expected fnr_proportional, entropy_topk, proportional_random or none)");
}

void StrategyConfig::validate() const {
    if (kind != StrategyKind::entropy_topk) return;
    if (select_count == 0) throw ConfigError("entropy_topk: select_count must be >= 1");
    if (select_count > candidate_count)
        throw ConfigError("entropy_topk: select_count (" + std::to_string(select_count) +
                          ") exceeds candidate_count (" + std::to_string(candidate_count) + ")");
}

std::vector<std::size_t> largest_remainder(std::span<const double> quotas, std::size_t total) {
    const std::size_t n = quotas.size();
    std::vector<std::size_t> out(n, 0);
    if (n == 0) return out;
    std::vector<double> frac(n, 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(quotas[i] >= 0.0) || !std::isfinite(quotas[i]))
            throw ConfigError("largest_remainder: quotas must be finite and non-negative");
        const double f = std::floor(quotas[i]);
        out[i] = static_cast<std::size_t>(f);
        frac[i] = quotas[i] - f;
        assigned += out[i];
    }
    if (assigned > total) throw ConfigError("largest_remainder: quotas exceed the total");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k % n]];
    return out;
}

namespace {

void check_budget_vector(const Eigen::VectorXd& v, std::span<const std::size_t> remaining,
                         const char* what) {
    if (static_cast<std::size_t>(v.size()) != remaining.size())
        throw ConfigError(std::string(what) + ": expected " + std::to_string(remaining.size()) +
                          " entries, got " + std::to_string(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0 && v[i] <= 1.0))
            throw ConfigError(std::string(what) + ": entry " + std::to_string(i) +
                              " is outside [0, 1]");
    }
}

AllocationRequest allocate_by_weights(const Eigen::VectorXd& weights, std::size_t budget,
                                      std::span<const std::size_t> remaining) {
    const auto n = static_cast<std::size_t>(weights.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += weights[static_cast<Eigen::Index>(i)];

    std::vector<double> quotas(n, 0.0);
    if (sum > 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            quotas[i] = weights[static_cast<Eigen::Index>(i)] * static_cast<double>(budget) / sum;
    } else {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < n; ++i)
            if (remaining[i] > 0) open.push_back(i);
        if (open.empty()) return {std::vector<std::size_t>(n, 0), 0};
        for (auto i : open) quotas[i] = static_cast<double>(budget) / static_cast<double>(open.size());
    }
    return {largest_remainder(quotas, budget), 0};
}

}  // namespace

AllocationRequest allocate_fnr(const Eigen::VectorXd& fnr, std::size_t budget,
                               std::span<const std::size_t> pool_remaining) {
    check_budget_vector(fnr, pool_remaining, "allocate_fnr");
    return allocate_by_weights(fnr, budget, pool_remaining);
}

AllocationRequest allocate_proportional(const Eigen::VectorXd& delta, std::size_t budget,
                                        std::span<const std::size_t> pool_remaining) {
    check_budget_vector(delta, pool_remaining, "allocate_proportional");
    return allocate_by_weights(delta, budget, pool_remaining);
}

double entropy_of(const Eigen::Ref<const Eigen::VectorXd>& proba) {
    if (proba.size() == 0) throw ConfigError("entropy_of: empty probability vector");
    if ((proba.array() < 0.0).any() || !proba.allFinite())
        throw ConfigError("entropy_of: probabilities must be finite and non-negative");
    if (std::abs(proba.sum() - 1.0) > 1e-6)
        throw ConfigError("entropy_of: probabilities do not sum to 1");
    double h = 0.0;
    for (Eigen::Index k = 0; k < proba.size(); ++k)
        if (proba[k] > 0.0) h -= proba[k] * std::log(proba[k]);
    return h;
}

std::vector<std::size_t> top_k_by_entropy(std::span<const double> entropies,
                                          std::span<const std::string> ids, std::size_t k) {
    if (entropies.size() != ids.size())
        throw ConfigError("top_k_by_entropy: entropy and id counts differ");
    std::vector<std::size_t> order(entropies.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t keep = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (entropies[a] != entropies[b]) return entropies[a] > entropies[b];
                          return ids[a] < ids[b];
                      });
    order.resize(keep);
    return order;
}

std::vector<std::size_t> entropy_candidate_counts(const Eigen::VectorXd& delta,
                                                  std::size_t candidate_count,
                                                  std::span<const std::size_t> remaining) {
    const auto n = remaining.size();
    if (static_cast<std::size_t>(delta.size()) != n)
        throw ConfigError("entropy candidates: delta length does not match the class count");

    std::vector<double> quotas(n);
    for (std::size_t i = 0; i < n; ++i)
        quotas[i] = delta[static_cast<Eigen::Index>(i)] * static_cast<double>(candidate_count);
    const std::size_t stock = std::accumulate(remaining.begin(), remaining.end(), std::size_t{0});
    const std::size_t target = std::min(candidate_count, stock);

    std::vector<std::size_t> want = largest_remainder(quotas, candidate_count);
    std::vector<std::size_t> take(n);
    for (std::size_t i = 0; i < n; ++i) take[i] = std::min(want[i], remaining[i]);

    auto taken = [&] { return std::accumulate(take.begin(), take.end(), std::size_t{0}); };
    while (taken() < target) {
        const std::size_t deficit = target - taken();
        std::vector<double> weight(n, 0.0);
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (take[i] < remaining[i]) {
                weight[i] = delta[static_cast<Eigen::Index>(i)];
                wsum += weight[i];
            }
        }
        if (wsum <= 0.0) {
            // No delta mass left among classes with stock: spread by spare stock.
            for (std::size_t i = 0; i < n; ++i) {
                weight[i] = static_cast<double>(remaining[i] - take[i]);
                wsum += weight[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            quotas[i] = weight[i] * static_cast<double>(deficit) / wsum;
        const auto extra = largest_remainder(quotas, deficit);
        for (std::size_t i = 0; i < n; ++i)
            take[i] = std::min(take[i] + extra[i], remaining[i]);
    }
    return take;
}

EntropySelection select_entropy_topk(const TrainedModel& model, ClassPools& pools,
                                     const Eigen::VectorXd& full_train_delta,
                                     std::size_t candidate_count, std::size_t select_count,
                                     RandomSource& rng) {
    StrategyConfig{StrategyKind::entropy_topk, candidate_count, select_count}.validate();
    if (full_train_delta.size() != pools.num_classes() || (full_train_delta.array() < 0.0).any() ||
        std::abs(full_train_delta.sum() - 1.0) > 1e-6)
        throw ConfigError("select_entropy_topk: delta must be a distribution over the classes");
    if (pools.all_empty()) throw PoolExhausted("select_entropy_topk: every class pool is empty");

    EntropySelection out;
    out.candidates_per_class =
        entropy_candidate_counts(full_train_delta, candidate_count, pools.remaining());

    SampleSet candidates;
    for (int c = 0; c < pools.num_classes(); ++c) {
        auto drawn = pools.draw(ClassId{c}, out.candidates_per_class[static_cast<std::size_t>(c)]);
        for (auto& s : drawn.samples) candidates.push_back(std::move(s));
    }

    const Eigen::MatrixXd proba = predict_proba(model, candidates);
    std::vector<double> entropies(candidates.size());
    std::vector<std::string> ids(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        entropies[k] = entropy_of(proba.col(static_cast<Eigen::Index>(k)));
        ids[k] = candidates[k].id;
    }
    const auto chosen = top_k_by_entropy(entropies, ids, select_count);

    std::vector<char> is_chosen(candidates.size(), 0);
    for (auto k : chosen) is_chosen[k] = 1;
    SampleSet rejected;
    for (auto k : chosen) {
        out.selected.push_back(std::move(candidates[k]));
        out.selected_entropy.push_back(entropies[k]);
    }
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (is_chosen[k]) continue;
        rejected.push_back(std::move(candidates[k]));
        out.rejected_entropy.push_back(entropies[k]);
    }
    pools.give_back(std::move(rejected), rng);
    return out;
}

SampleSet sample_fraction(const SampleSet& train, int num_classes, double fraction,
                          RandomSource& rng) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("sample_fraction: fraction must be in (0, 1], got " +
                          std::to_string(fraction));
    std::vector<SampleSet> by_class(static_cast<std::size_t>(num_classes));
    for (const auto& s : train) {
        if (s.label.index < 0 || s.label.index >= num_classes)
            throw ConfigError("sample_fraction: sample '" + s.id + "' has an unknown class");
        by_class[static_cast<std::size_t>(s.label.index)].push_back(s);
    }
    std::vector<double> quotas(by_class.size());
    for (std::size_t i = 0; i < by_class.size(); ++i)
        quotas[i] = static_cast<double>(by_class[i].size()) * fraction;
    const auto target =
        static_cast<std::size_t>(std::llround(static_cast<double>(train.size()) * fraction));
    const auto take = largest_remainder(quotas, target);

    SampleSet out;
    out.reserve(target);
    for (std::size_t i = 0; i < by_class.size(); ++i) {
        auto& members = by_class[i];
        rng.shuffle(std::span<Sample>(members));
        const std::size_t k = std::min(take[i], members.size());
        for (std::size_t m = 0; m < k; ++m) out.push_back(std::move(members[m]));
    }
    return out;
}

}  // namespace activepool
