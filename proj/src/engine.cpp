#include "activepool/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace activepool {

namespace {

// Tags for RandomSource::derive; each consumer of randomness gets its own stream.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kQueryStream = 3;
constexpr std::uint64_t kFractionStream = 4;

TrainedModel train_round(const ExperimentConfig& config, const TrainingSet& ts,
                         const SampleSet& validation, const RandomSource& root, int round,
                         const TrainedModel* previous) {
    RandomSource rng = root.derive({static_cast<std::uint64_t>(round), kTrainStream});
    const TrainedModel* initial = config.learner.warm_start ? previous : nullptr;
    try {
        return train(config.learner, ts, validation, rng, initial);
    } catch (const TrainingError& e) {
        throw RunError(std::string(e.what()) + " (seed " + std::to_string(config.seed) +
                           ", iteration " + std::to_string(round) + ")",
                       config.seed, round);
    }
}

IterationRecord describe_round(int round, const TrainingSet& ts, const TrainedModel& model,
                               const SampleSet& validation, int num_classes) {
    IterationRecord rec;
    rec.iteration = round;
    rec.appends = round;
    rec.train_counts = ts.counts();
    rec.delta = class_balance(ts);
    rec.val_metrics = evaluate(model, validation, num_classes);
    rec.val_fnr = rec.val_metrics.fnr();
    rec.learner_stopped_epoch = model.stopped_epoch;
    return rec;
}

void finish(RunRecord& run, const DatasetBundle& bundle, const TrainedModel& model,
            const TrainingSet& ts) {
    run.final_test_metrics = evaluate(model, bundle.test(), bundle.num_classes());
    run.train_pool_size = bundle.train().size();
    run.total_labeled = ts.size();
    run.labeled_fraction_of_train =
        static_cast<double>(ts.size()) / static_cast<double>(bundle.train().size());
}

}  // namespace

const char* to_string(Arm arm) { return arm == Arm::sl ? "sl" : "al"; }

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::single_round: return "single_round";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::pool_exhausted: return "pool_exhausted";
        case StopReason::pools_empty: return "pools_empty";
    }
    return "single_round";
}

void StoppingRule::validate() const {
    if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0 (0 disables it)");
    if (max_iterations == 0 && !stop_on_exhaustion)
        throw ConfigError(
            "stopping rule: enable max_iterations or stop_on_exhaustion (or both)");
}

void ExperimentConfig::validate() const {
    learner.validate();
    if (!(learner.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (arm == Arm::sl) {
        if (!sl_fraction) throw ConfigError("arm 'sl' requires sl_fraction");
        if (!(*sl_fraction > 0.0 && *sl_fraction <= 1.0))
            throw ConfigError("sl_fraction must be in (0, 1]");
        return;
    }
    if (sl_fraction) throw ConfigError("sl_fraction is only valid for arm 'sl'");
    strategy.validate();
    if (strategy.kind == StrategyKind::none) return;
    stopping.validate();
    if (budget == 0) throw ConfigError("budget must be >= 1 for an active-learning strategy");
    if (strategy.kind == StrategyKind::entropy_topk && strategy.select_count != budget)
        throw ConfigError("entropy_topk: select_count must equal budget");
}

MetricsReport evaluate(const TrainedModel& model, const SampleSet& samples, int num_classes) {
    const auto predicted = predict(model, samples);
    std::vector<ClassId> truth;
    truth.reserve(samples.size());
    for (const auto& s : samples) truth.push_back(s.label);
    return report(confusion(truth, predicted, num_classes));
}

RunRecord run_active_learning(const DatasetBundle& bundle, const ExperimentConfig& config,
                              const ProgressFn& progress) {
    config.validate();
    if (config.arm != Arm::al) throw ConfigError("run_active_learning needs arm 'al'");
    if (bundle.validation().empty()) throw ConfigError("the validation split is empty");

    const int num_classes = bundle.num_classes();
    const RandomSource root(config.seed);
    RandomSource split_rng = root.derive({kSplitStream});
    InitialSplit split =
        split_initial(bundle.train(), num_classes, config.per_class_initial, split_rng);
    if (split.training.empty())
        throw ConfigError("the initial training set is empty (per_class_initial = 0?)");
    TrainingSet ts = std::move(split.training);
    ClassPools pools = std::move(split.pools);

    const Eigen::VectorXd full_delta = class_balance(bundle.class_counts(bundle.train()));
    const int max_iter = config.stopping.max_iterations;

    RunRecord run;
    run.config = config;
    std::optional<TrainedModel> model;

    for (int round = 0;; ++round) {
        ts.set_iteration(round);
        TrainedModel current = train_round(config, ts, bundle.validation(), root, round,
                                           model ? &*model : nullptr);
        IterationRecord rec = describe_round(round, ts, current, bundle.validation(), num_classes);
        rec.pool_remaining = pools.remaining();
        model = std::move(current);

        std::optional<StopReason> stop;
        if (config.strategy.kind == StrategyKind::none) {
            stop = StopReason::single_round;
        } else if (max_iter > 0 && round >= max_iter) {
            stop = StopReason::max_iterations;
        } else if (pools.all_empty()) {
            stop = StopReason::pools_empty;
        }

        if (!stop) {
            AllocationRequest request;
            switch (config.strategy.kind) {
                case StrategyKind::fnr_proportional:
                    request = allocate_fnr(rec.val_fnr, config.budget, rec.pool_remaining);
                    break;
                case StrategyKind::proportional_random:
                    request = allocate_proportional(rec.delta, config.budget, rec.pool_remaining);
                    break;
                case StrategyKind::entropy_topk: {
                    std::vector<double> quotas(static_cast<std::size_t>(num_classes));
                    for (int i = 0; i < num_classes; ++i)
                        quotas[static_cast<std::size_t>(i)] =
                            full_delta[i] * static_cast<double>(config.strategy.candidate_count);
                    request.counts = largest_remainder(quotas, config.strategy.candidate_count);
                    break;
                }
                case StrategyKind::none: break;
            }
            request.iteration = round;

            bool unsatisfiable = false;
            for (int i = 0; i < num_classes; ++i) {
                const auto k = static_cast<std::size_t>(i);
                if (request.counts[k] > rec.pool_remaining[k]) unsatisfiable = true;
            }
            if (config.stopping.stop_on_exhaustion && unsatisfiable) {
                stop = StopReason::pool_exhausted;
                rec.blocked_request = std::move(request);
            } else if (config.strategy.kind == StrategyKind::entropy_topk) {
                RandomSource query_rng = root.derive({static_cast<std::uint64_t>(round), kQueryStream});
                auto picked = select_entropy_topk(*model, pools, full_delta,
                                                  config.strategy.candidate_count,
                                                  config.strategy.select_count, query_rng);
                AllocationRequest taken{std::vector<std::size_t>(static_cast<std::size_t>(num_classes), 0),
                                        round};
                for (const auto& s : picked.selected) ++taken.counts[static_cast<std::size_t>(s.label.index)];
                rec.candidates = std::move(picked.candidates_per_class);
                rec.shortfall.assign(static_cast<std::size_t>(num_classes), 0);
                rec.allocation = std::move(taken);
                ts.append(std::move(picked.selected));
            } else {
                rec.shortfall.assign(static_cast<std::size_t>(num_classes), 0);
                for (int i = 0; i < num_classes; ++i) {
                    const auto k = static_cast<std::size_t>(i);
                    DrawResult drawn = draw_from_pool(pools, ClassId{i}, request.counts[k]);
                    rec.shortfall[k] = drawn.shortfall();
                    ts.append(std::move(drawn.samples));
                }
                rec.allocation = std::move(request);
            }
        }

        if (progress) progress(config, rec);
        run.iterations.push_back(std::move(rec));
        if (stop) {
            run.stop_reason = *stop;
            break;
        }
    }

    finish(run, bundle, *model, ts);
    return run;
}

RunRecord run_supervised(const DatasetBundle& bundle, double fraction,
                         const ExperimentConfig& config, const ProgressFn& progress) {
    ExperimentConfig cfg = config;
    cfg.arm = Arm::sl;
    cfg.sl_fraction = fraction;
    cfg.validate();
    if (bundle.validation().empty()) throw ConfigError("the validation split is empty");

    const RandomSource root(cfg.seed);
    RandomSource fraction_rng = root.derive({kFractionStream});
    TrainingSet ts(bundle.num_classes());
    ts.append(sample_fraction(bundle.train(), bundle.num_classes(), fraction, fraction_rng));

    const TrainedModel model = train_round(cfg, ts, bundle.validation(), root, 0, nullptr);
    IterationRecord rec = describe_round(0, ts, model, bundle.validation(), bundle.num_classes());
    if (progress) progress(cfg, rec);

    RunRecord run;
    run.config = cfg;
    run.iterations.push_back(std::move(rec));
    run.stop_reason = StopReason::single_round;
    finish(run, bundle, model, ts);
    return run;
}

RunRecord run_arm(const DatasetBundle& bundle, const ExperimentConfig& config,
                  const ProgressFn& progress) {
    if (config.arm == Arm::sl) {
        if (!config.sl_fraction) throw ConfigError("arm 'sl' requires sl_fraction");
        return run_supervised(bundle, *config.sl_fraction, config, progress);
    }
    return run_active_learning(bundle, config, progress);
}

std::vector<AggregateStat> aggregate(std::span<const RunRecord> runs,
                                     const std::vector<ClassInfo>& classes) {
    std::vector<AggregateStat> out;
    if (runs.empty()) return out;
    auto add = [&](std::string name, auto&& value_of) {
        AggregateStat stat;
        stat.name = std::move(name);
        stat.runs = runs.size();
        double total = 0.0;
        for (const auto& r : runs) total += value_of(r);
        stat.mean = total / static_cast<double>(runs.size());
        if (runs.size() > 1) {
            double ss = 0.0;
            for (const auto& r : runs) {
                const double d = value_of(r) - stat.mean;
                ss += d * d;
            }
            stat.std = std::sqrt(ss / static_cast<double>(runs.size() - 1));
        }
        out.push_back(std::move(stat));
    };
    for (std::size_t i = 0; i < classes.size(); ++i)
        add(classes[i].name, [i](const RunRecord& r) { return r.final_test_metrics.per_class.at(i).f1; });
    add("Total (micro)", [](const RunRecord& r) { return r.final_test_metrics.micro_f1; });
    add("Total (macro)", [](const RunRecord& r) { return r.final_test_metrics.macro_f1; });
    add("Accuracy", [](const RunRecord& r) { return r.final_test_metrics.accuracy; });
    add("Labeled fraction", [](const RunRecord& r) { return r.labeled_fraction_of_train; });
    return out;
}

SweepResult run_sweep(const DatasetBundle& bundle, const ExperimentConfig& config,
                      std::span<const std::uint64_t> seeds, int jobs,
                      const ProgressFn& progress) {
    if (seeds.empty()) throw ConfigError("a sweep needs at least one seed");
    config.validate();

    SweepResult result;
    result.runs.resize(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    ProgressFn locked_progress;
    if (progress) {
        locked_progress = [&](const ExperimentConfig& c, const IterationRecord& r) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            progress(c, r);
        };
    }

    auto worker = [&] {
        for (std::size_t k = next++; k < seeds.size(); k = next++) {
            ExperimentConfig cfg = config;
            cfg.seed = seeds[k];
            try {
                result.runs[k] = run_arm(bundle, cfg, locked_progress);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(seeds.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t k = 0; k < seeds.size(); ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const RunError&) {
            throw;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw RunError("seed " + std::to_string(seeds[k]) + " failed: " + e.what(), seeds[k], -1);
        }
    }
    result.stats = aggregate(result.runs, bundle.classes());
    return result;
}

std::string format_mean_std(double mean, double std, bool show_std) {
    char buf[64];
    if (show_std)
        std::snprintf(buf, sizeof buf, "%.2f(%.2f)", mean * 100.0, std * 100.0);
    else
        std::snprintf(buf, sizeof buf, "%.2f", mean * 100.0);
    return buf;
}

}  // namespace activepool
