#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "activepool/core.hpp"
#include "activepool/learner.hpp"

namespace activepool {

// Raised when the pools cannot supply any more candidates.
class PoolExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AllocationRequest {
    std::vector<std::size_t> counts;  // N_i per class
    int iteration = 0;

    std::size_t total() const;
};

enum class StrategyKind { fnr_proportional, entropy_topk, proportional_random, none };

const char* to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& name);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::fnr_proportional;
    std::size_t candidate_count = 0;  // entropy_topk only
    std::size_t select_count = 0;     // entropy_topk only

    void validate() const;
};

// Hamilton apportionment: floor of each quota, then one extra unit to the
// largest fractional remainders, ties to the lower index. Quotas must be
// non-negative; the result sums to `total` when the quotas sum to it.
std::vector<std::size_t> largest_remainder(std::span<const double> quotas, std::size_t total);

// N_i = fnr_i * S / sum(fnr), integerized by largest remainder. If every fnr
// is zero the budget is spread uniformly over classes whose pool is non-empty.
// Not clipped to pool sizes.
AllocationRequest allocate_fnr(const Eigen::VectorXd& fnr, std::size_t budget,
                               std::span<const std::size_t> pool_remaining);
inline AllocationRequest allocate_fnr(const Eigen::VectorXd& fnr, std::size_t budget,
                                      const ClassPools& pools) {
    return allocate_fnr(fnr, budget, pools.remaining());
}

// Same rule with the class balance delta in place of the normalized FNR.
AllocationRequest allocate_proportional(const Eigen::VectorXd& delta, std::size_t budget,
                                        std::span<const std::size_t> pool_remaining);
inline AllocationRequest allocate_proportional(const Eigen::VectorXd& delta, std::size_t budget,
                                               const ClassPools& pools) {
    return allocate_proportional(delta, budget, pools.remaining());
}

// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy_of(const Eigen::Ref<const Eigen::VectorXd>& proba);

// Indices of the k highest entropies; ties go to the smaller id.
std::vector<std::size_t> top_k_by_entropy(std::span<const double> entropies,
                                          std::span<const std::string> ids, std::size_t k);

// Candidate counts per class: largest-remainder share of candidate_count by
// delta, clipped to pool stock with the deficit re-spread proportionally over
// classes that still have stock.
std::vector<std::size_t> entropy_candidate_counts(const Eigen::VectorXd& delta,
                                                  std::size_t candidate_count,
                                                  std::span<const std::size_t> remaining);

struct EntropySelection {
    SampleSet selected;
    std::vector<std::size_t> candidates_per_class;
    std::vector<double> selected_entropy;
    std::vector<double> rejected_entropy;
};

// Draws candidates by delta, keeps the select_count most uncertain and
// returns the rest to their pools.
EntropySelection select_entropy_topk(const TrainedModel& model, ClassPools& pools,
                                     const Eigen::VectorXd& full_train_delta,
                                     std::size_t candidate_count, std::size_t select_count,
                                     RandomSource& rng);

// Stratified subsample keeping the natural class distribution: per class
// about count_i * fraction, largest-remainder adjusted so the total is
// round(total * fraction).
SampleSet sample_fraction(const SampleSet& train, int num_classes, double fraction,
                          RandomSource& rng);

}  // namespace activepool
