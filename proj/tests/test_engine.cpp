#include <numeric>

#include <gtest/gtest.h>

#include "activepool/engine.hpp"
#include "activepool/synthgen.hpp"
#include "fixtures.hpp"

using namespace activepool;

namespace {

using Counts = std::vector<std::size_t>;

ExperimentConfig al_config(StrategyKind kind, std::size_t initial, std::size_t budget, int j,
                           bool ood = false) {
    ExperimentConfig c;
    c.strategy.kind = kind;
    c.per_class_initial = initial;
    c.budget = budget;
    c.stopping.max_iterations = j;
    c.stopping.stop_on_exhaustion = ood;
    c.learner.learning_rate = 0.05;
    c.learner.max_epochs = 20;
    c.seed = 11;
    return c;
}

std::size_t sum(const Counts& c) { return std::accumulate(c.begin(), c.end(), std::size_t{0}); }

void expect_ledger(const RunRecord& run) {
    for (std::size_t k = 0; k < run.iterations.size(); ++k) {
        const auto& it = run.iterations[k];
        EXPECT_EQ(it.iteration, static_cast<int>(k));
        EXPECT_EQ(it.appends, static_cast<int>(k));
        EXPECT_EQ(sum(it.train_counts) + sum(it.pool_remaining), run.train_pool_size);
        const auto delta = class_balance(it.train_counts);
        EXPECT_LT((delta - it.delta).cwiseAbs().maxCoeff(), 1e-15);
        if (k + 1 < run.iterations.size()) {
            ASSERT_TRUE(it.allocation.has_value());
            const auto& next = run.iterations[k + 1];
            std::size_t grew = 0;
            for (std::size_t i = 0; i < it.train_counts.size(); ++i) {
                EXPECT_EQ(next.train_counts[i] - it.train_counts[i], it.allocation->counts[i] - it.shortfall[i]);
                grew += next.train_counts[i] - it.train_counts[i];
            }
            EXPECT_LE(grew, run.config.budget);
        } else {
            EXPECT_FALSE(it.allocation.has_value());
        }
    }
    EXPECT_EQ(run.total_labeled, sum(run.iterations.back().train_counts));
    EXPECT_DOUBLE_EQ(run.labeled_fraction_of_train,
                     static_cast<double>(run.total_labeled) / static_cast<double>(run.train_pool_size));
}

}  // namespace

TEST(Config, Validation) {
    auto c = al_config(StrategyKind::fnr_proportional, 5, 10, 5);
    EXPECT_NO_THROW(c.validate());
    c.stopping = {0, false};
    EXPECT_THROW(c.validate(), ConfigError);
    c = al_config(StrategyKind::fnr_proportional, 5, 0, 5);
    EXPECT_THROW(c.validate(), ConfigError);
    c = al_config(StrategyKind::fnr_proportional, 5, 10, 5);
    c.learner.learning_rate = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = al_config(StrategyKind::fnr_proportional, 5, 10, 5);
    c.sl_fraction = 0.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c.arm = Arm::sl;
    EXPECT_NO_THROW(c.validate());
    c.sl_fraction = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = al_config(StrategyKind::entropy_topk, 5, 10, 5);
    c.strategy.candidate_count = 15;
    c.strategy.select_count = 10;
    EXPECT_NO_THROW(c.validate());
    c.strategy.select_count = 9;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Loop, IterStopsAfterJAppends) {
    const auto bundle = generate(fixture::easy_spec({200, 200, 200}, 20, 20));
    for (int j : {1, 3, 5}) {
        const auto run = run_active_learning(bundle, al_config(StrategyKind::fnr_proportional, 10, 12, j));
        ASSERT_EQ(run.iterations.size(), static_cast<std::size_t>(j + 1));
        EXPECT_EQ(run.iterations.back().appends, j);
        EXPECT_EQ(run.stop_reason, StopReason::max_iterations);
        EXPECT_EQ(run.total_labeled, 30u + 12u * static_cast<std::size_t>(j));
        expect_ledger(run);
    }
}

TEST(Loop, OodStopsOnFirstUnsatisfiableRequest) {
    // pools [3, 3], S = 10: every split of 10 over two classes overflows one pool
    const auto bundle = generate(fixture::easy_spec({8, 8}, 10, 10));
    const auto run = run_active_learning(bundle, al_config(StrategyKind::fnr_proportional, 5, 10, 0, true));
    ASSERT_EQ(run.iterations.size(), 1u);
    EXPECT_EQ(run.stop_reason, StopReason::pool_exhausted);
    ASSERT_TRUE(run.iterations[0].blocked_request.has_value());
    EXPECT_EQ(sum(run.iterations[0].blocked_request->counts), 10u);
    EXPECT_FALSE(run.iterations[0].allocation.has_value());
    EXPECT_EQ(run.total_labeled, 10u);
}

TEST(Loop, OodHandTrace) {
    // Symmetric classes and proportional allocation request [5, 5] each round.
    // Pools 17 -> 12 -> 7 -> 2; the fourth request cannot be met.
    const auto bundle = generate(fixture::easy_spec({22, 22}, 10, 10));
    const auto run = run_active_learning(bundle, al_config(StrategyKind::proportional_random, 5, 10, 0, true));
    ASSERT_EQ(run.iterations.size(), 4u);
    EXPECT_EQ(run.stop_reason, StopReason::pool_exhausted);
    EXPECT_EQ(run.iterations[3].pool_remaining, (Counts{2, 2}));
    EXPECT_EQ(run.iterations[3].blocked_request->counts, (Counts{5, 5}));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(run.iterations[k].allocation->counts, (Counts{5, 5}));
    expect_ledger(run);
}

TEST(Loop, ShortfallContinuesWithoutExhaustionStop) {
    const auto bundle = generate(fixture::easy_spec({17, 45}, 10, 10));
    const auto run = run_active_learning(bundle, al_config(StrategyKind::proportional_random, 5, 10, 5, false));
    ASSERT_EQ(run.iterations.size(), 6u);
    EXPECT_EQ(run.stop_reason, StopReason::max_iterations);
    const std::vector<Counts> alloc{{5, 5}, {5, 5}, {5, 5}, {5, 5}, {4, 6}};
    const std::vector<Counts> shortfall{{0, 0}, {0, 0}, {3, 0}, {5, 0}, {4, 0}};
    const std::vector<Counts> counts{{5, 5}, {10, 10}, {15, 15}, {17, 20}, {17, 25}, {17, 31}};
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_EQ(run.iterations[k].train_counts, counts[k]) << "round " << k;
        if (k < 5) {
            EXPECT_EQ(run.iterations[k].allocation->counts, alloc[k]) << "round " << k;
            EXPECT_EQ(run.iterations[k].shortfall, shortfall[k]) << "round " << k;
        }
    }
    expect_ledger(run);
}

TEST(Loop, StopsWhenPoolsRunDry) {
    const auto bundle = generate(fixture::easy_spec({15, 15}, 10, 10));
    const auto run = run_active_learning(bundle, al_config(StrategyKind::proportional_random, 5, 10, 10, false));
    EXPECT_EQ(run.stop_reason, StopReason::pools_empty);
    EXPECT_EQ(run.total_labeled, 30u);
    expect_ledger(run);
}

TEST(Loop, StrategyNoneIsSingleRound) {
    const auto bundle = generate(fixture::easy_spec({30, 30}, 10, 10));
    auto cfg = al_config(StrategyKind::none, 10, 0, 0);
    const auto run = run_active_learning(bundle, cfg);
    ASSERT_EQ(run.iterations.size(), 1u);
    EXPECT_FALSE(run.iterations[0].allocation.has_value());
    EXPECT_EQ(run.stop_reason, StopReason::single_round);
}

TEST(Loop, FnrAllocationIsAuditable) {
    GeneratorSpec spec = fixture::easy_spec({300, 300, 300}, 40, 40);
    spec.class_sigmas = {2.5, 2.5, 6.0};
    const auto bundle = generate(spec);
    const auto run = run_active_learning(bundle, al_config(StrategyKind::fnr_proportional, 20, 30, 4));
    for (const auto& it : run.iterations) {
        if (!it.allocation) continue;
        EXPECT_EQ(it.allocation->counts, allocate_fnr(it.val_fnr, 30, it.pool_remaining).counts);
        EXPECT_EQ(it.val_fnr, it.val_metrics.fnr());
    }
    expect_ledger(run);
}

TEST(Loop, EntropyRun) {
    const auto bundle = generate(fixture::easy_spec({100, 60, 40}, 20, 20));
    auto cfg = al_config(StrategyKind::entropy_topk, 10, 12, 3);
    cfg.strategy.candidate_count = 20;
    cfg.strategy.select_count = 12;
    const auto run = run_active_learning(bundle, cfg);
    ASSERT_EQ(run.iterations.size(), 4u);
    for (std::size_t k = 0; k + 1 < run.iterations.size(); ++k) {
        EXPECT_EQ(sum(run.iterations[k].allocation->counts), 12u);
        EXPECT_EQ(sum(run.iterations[k].candidates), 20u);
    }
    expect_ledger(run);
}

TEST(Loop, WarmStartRuns) {
    const auto bundle = generate(fixture::easy_spec({60, 60}, 10, 10));
    auto cfg = al_config(StrategyKind::fnr_proportional, 10, 10, 2);
    cfg.learner.warm_start = true;
    const auto run = run_active_learning(bundle, cfg);
    EXPECT_EQ(run.iterations.size(), 3u);
}

TEST(Loop, Deterministic) {
    const auto bundle = generate(fixture::easy_spec({80, 80, 80}, 20, 20));
    const auto cfg = al_config(StrategyKind::fnr_proportional, 10, 15, 3);
    const auto a = run_active_learning(bundle, cfg);
    const auto b = run_active_learning(bundle, cfg);
    ASSERT_EQ(a.iterations.size(), b.iterations.size());
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        EXPECT_EQ(a.iterations[k].train_counts, b.iterations[k].train_counts);
        EXPECT_EQ(a.iterations[k].val_fnr, b.iterations[k].val_fnr);
    }
    EXPECT_EQ(a.final_test_metrics.macro_f1, b.final_test_metrics.macro_f1);
}

TEST(Loop, EmptyInitialSetRejected) {
    const auto bundle = generate(fixture::easy_spec({20, 20}, 10, 10));
    EXPECT_THROW(run_active_learning(bundle, al_config(StrategyKind::fnr_proportional, 0, 10, 2)), ConfigError);
}

TEST(Supervised, FractionOneUsesEverything) {
    const auto bundle = generate(fixture::easy_spec({50, 30}, 10, 10));
    auto cfg = al_config(StrategyKind::none, 0, 0, 0);
    const auto a = run_supervised(bundle, 1.0, cfg);
    EXPECT_EQ(a.total_labeled, 80u);
    EXPECT_EQ(a.iterations.size(), 1u);
    EXPECT_DOUBLE_EQ(a.labeled_fraction_of_train, 1.0);
    const auto b = run_supervised(bundle, 1.0, cfg);
    EXPECT_EQ(a.final_test_metrics.macro_f1, b.final_test_metrics.macro_f1);
    EXPECT_EQ(a.final_test_metrics.fnr(), b.final_test_metrics.fnr());
    EXPECT_EQ(run_supervised(bundle, 0.2, cfg).total_labeled, 16u);
}

TEST(Sweep, Aggregates) {
    const auto bundle = generate(fixture::easy_spec({60, 60}, 10, 10));
    auto cfg = al_config(StrategyKind::fnr_proportional, 10, 10, 2);
    const std::vector<std::uint64_t> one{4};
    const auto single = run_sweep(bundle, cfg, one);
    for (const auto& s : single.stats) EXPECT_EQ(s.std, 0.0);
    const std::vector<std::uint64_t> same{4, 4, 4};
    const auto repeated = run_sweep(bundle, cfg, same, 3);
    for (const auto& s : repeated.stats) EXPECT_EQ(s.std, 0.0);
    const std::vector<std::uint64_t> five{1, 2, 3, 4, 5};
    const auto sweep = run_sweep(bundle, cfg, five, 2);
    ASSERT_EQ(sweep.runs.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(sweep.runs[k].config.seed, five[k]);
    EXPECT_EQ(sweep.stats.front().name, "c0");
    EXPECT_EQ(sweep.stats.size(), 2u + 4u);
    EXPECT_THROW(run_sweep(bundle, cfg, std::vector<std::uint64_t>{}), ConfigError);
}

TEST(Sweep, ParallelMatchesSerial) {
    const auto bundle = generate(fixture::easy_spec({60, 60}, 10, 10));
    const auto cfg = al_config(StrategyKind::fnr_proportional, 10, 10, 2);
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
    const auto a = run_sweep(bundle, cfg, seeds, 1);
    const auto b = run_sweep(bundle, cfg, seeds, 4);
    for (std::size_t k = 0; k < seeds.size(); ++k)
        EXPECT_EQ(a.runs[k].final_test_metrics.macro_f1, b.runs[k].final_test_metrics.macro_f1);
}

TEST(Sweep, FailingSeedIdentified) {
    SampleSet train, val, test;
    for (int k = 0; k < 40; ++k) {
        train.push_back(fixture::sample("tr" + std::to_string(k), k % 2, {1e154 * (k + 1)}));
        val.push_back(fixture::sample("va" + std::to_string(k), k % 2, {1e154 * (k + 1)}));
        test.push_back(fixture::sample("te" + std::to_string(k), k % 2, {1.0}));
    }
    const DatasetBundle bundle(fixture::classes(2), train, val, test);
    auto cfg = al_config(StrategyKind::fnr_proportional, 5, 5, 2);
    cfg.learner.learning_rate = 1e10;
    try {
        run_sweep(bundle, cfg, std::vector<std::uint64_t>{7, 8}, 2);
        FAIL() << "expected a run error";
    } catch (const RunError& e) {
        EXPECT_EQ(e.seed(), 7u);
        EXPECT_EQ(e.iteration(), 0);
    }
}

TEST(Format, MeanStd) {
    EXPECT_EQ(format_mean_std(0.9034, 0.0066), "90.34(0.66)");
    EXPECT_EQ(format_mean_std(0.5, 0.0), "50.00(0.00)");
    EXPECT_EQ(format_mean_std(0.5, 0.0, false), "50.00");
}
