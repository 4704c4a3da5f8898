#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "activepool/core.hpp"
#include "activepool/network.hpp"

namespace activepool {

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, int epoch) : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

struct LearnerConfig {
    LearnerKind kind = LearnerKind::softmax_linear;
    double learning_rate = 1.5e-4;
    int batch_size = 64;
    int max_epochs = 200;
    int patience = 5;
    int hidden_units = 32;
    double init_scale = 0.01;
    bool warm_start = false;

    // learning_rate may be 0 here (frozen parameters); experiment configs
    // require it to be positive.
    void validate() const;
};

const char* to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct EpochLog {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainedModel {
    LearnerConfig config;
    Network<double> network;
    std::vector<EpochLog> training_log;
    int stopped_epoch = 0;
    int best_epoch = 0;

    int num_classes() const { return network.classes(); }
    int feature_dim() const { return network.inputs(); }
};

// Packs features column-wise and labels into contiguous storage.
struct DesignMatrix {
    Eigen::MatrixXd x;
    Eigen::VectorXi labels;
};
DesignMatrix design_matrix(std::span<const Sample> samples);

// Mini-batch SGD on mean cross-entropy with patience-based early stopping.
// Returns the parameters of the epoch with the lowest validation loss.
TrainedModel train(const LearnerConfig& config, const TrainingSet& train_set,
                   std::span<const Sample> validation, RandomSource& rng,
                   const TrainedModel* initial = nullptr);

Eigen::VectorXd predict_proba(const TrainedModel& model, const Eigen::VectorXd& features);

// Argmax with ties resolved to the lowest class index.
ClassId predict(const TrainedModel& model, const Eigen::VectorXd& features);
ClassId argmax_class(const Eigen::Ref<const Eigen::VectorXd>& proba);

// Column-wise class probabilities for a batch of samples.
Eigen::MatrixXd predict_proba(const TrainedModel& model, std::span<const Sample> samples);
std::vector<ClassId> predict(const TrainedModel& model, std::span<const Sample> samples);

// Relative error between analytic and central-difference gradients, per
// parameter: |a - n| / max(|a|, |n|, kGradientCheckFloor).
inline constexpr double kGradientCheckStep = 1e-5;
inline constexpr double kGradientCheckFloor = 1e-8;

// Compares the analytic gradient with central finite differences at a random
// parameter point; returns the maximum relative error over all parameters.
double gradient_check(const LearnerConfig& config, std::span<const Sample> batch, int num_classes,
                      RandomSource& rng);

// Euclidean norm of the analytic loss gradient for the given batch.
double gradient_norm(const Network<double>& network, std::span<const Sample> batch);

}  // namespace activepool
