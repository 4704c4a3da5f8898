#include "activepool/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace activepool {

void LearnerConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learner: learning_rate must be a finite non-negative number");
    if (batch_size < 1) throw ConfigError("learner: batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("learner: max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("learner: patience must be >= 1");
    if (kind == LearnerKind::mlp && hidden_units < 1)
        throw ConfigError("learner: hidden_units must be >= 1");
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale))
        throw ConfigError("learner: init_scale must be a finite non-negative number");
}

const char* to_string(LearnerKind kind) {
    return kind == LearnerKind::mlp ? "mlp" : "softmax_linear";
}

LearnerKind learner_kind_from_string(const std::string& name) {
    if (name == "softmax_linear") return LearnerKind::softmax_linear;
    if (name == "mlp") return LearnerKind::mlp;
    throw ConfigError("unknown learner kind '" + name + "' (expected softmax_linear or mlp)");
}

DesignMatrix design_matrix(std::span<const Sample> samples) {
    DesignMatrix out;
    if (samples.empty()) return out;
    const auto d = samples.front().features.size();
    out.x.resize(d, static_cast<Eigen::Index>(samples.size()));
    out.labels.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k].features.size() != d)
            throw ConfigError("sample '" + samples[k].id + "' has mismatched feature dimension");
        out.x.col(static_cast<Eigen::Index>(k)) = samples[k].features;
        out.labels[static_cast<Eigen::Index>(k)] = samples[k].label.index;
    }
    return out;
}

TrainedModel train(const LearnerConfig& config, const TrainingSet& train_set,
                   std::span<const Sample> validation, RandomSource& rng,
                   const TrainedModel* initial) {
    config.validate();
    if (train_set.empty()) throw ConfigError("train: the training set is empty");
    if (validation.empty()) throw ConfigError("train: the validation set is empty");

    const DesignMatrix data = design_matrix(train_set.samples());
    const DesignMatrix val = design_matrix(validation);
    const int dim = static_cast<int>(data.x.rows());
    const int classes = train_set.num_classes();
    if (val.x.rows() != dim)
        throw ConfigError("train: validation dimension " + std::to_string(val.x.rows()) +
                          " differs from training dimension " + std::to_string(dim));
    if ((val.labels.array() < 0).any() || (val.labels.array() >= classes).any())
        throw ConfigError("train: validation contains an unknown class");

    Network<double> net;
    if (initial != nullptr) {
        net = initial->network;
        const auto expect = Network<double>::zeros(config.kind, dim, config.hidden_units, classes);
        if (!net.same_shape(expect))
            throw ConfigError("train: initial model shape does not match the configuration");
    } else {
        net = Network<double>::random(config.kind, dim, config.hidden_units, classes,
                                      config.init_scale, rng);
    }

    TrainedModel model;
    model.config = config;
    Network<double> best = net;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int stale = 0;

    const Eigen::Index n = data.x.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Network<double> grad;
    Eigen::MatrixXd batch_x;
    Eigen::VectorXi batch_y;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(std::span<Eigen::Index>(order));
        double loss_sum = 0.0;
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index len = std::min<Eigen::Index>(config.batch_size, n - start);
            batch_x.resize(data.x.rows(), len);
            batch_y.resize(len);
            for (Eigen::Index k = 0; k < len; ++k) {
                const auto src = order[static_cast<std::size_t>(start + k)];
                batch_x.col(k) = data.x.col(src);
                batch_y[k] = data.labels[src];
            }
            const double batch_loss = net.loss_and_gradient(batch_x, batch_y, grad);
            loss_sum += batch_loss * static_cast<double>(len);
            auto& layers = net.layers();
            for (std::size_t i = 0; i < layers.size(); ++i) {
                layers[i].weight -= config.learning_rate * grad.layers()[i].weight;
                layers[i].bias -= config.learning_rate * grad.layers()[i].bias;
            }
        }
        const double train_loss = loss_sum / static_cast<double>(n);
        const double val_loss = net.loss(val.x, val.labels);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss) || !net.all_finite())
            throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                                    " (non-finite loss)",
                                epoch);
        model.training_log.push_back({train_loss, val_loss});

        if (val_loss < best_val) {
            best_val = val_loss;
            best = net;
            best_epoch = epoch;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
    }

    model.network = std::move(best);
    model.stopped_epoch = static_cast<int>(model.training_log.size());
    model.best_epoch = best_epoch;
    return model;
}

namespace {

void check_dim(const TrainedModel& model, Eigen::Index dim) {
    if (dim != model.feature_dim())
        throw ConfigError("feature dimension " + std::to_string(dim) +
                          " does not match model input dimension " +
                          std::to_string(model.feature_dim()));
}

}  // namespace

Eigen::VectorXd predict_proba(const TrainedModel& model, const Eigen::VectorXd& features) {
    check_dim(model, features.size());
    return model.network.probabilities(features).col(0);
}

ClassId argmax_class(const Eigen::Ref<const Eigen::VectorXd>& proba) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < proba.size(); ++k)
        if (proba[k] > proba[best]) best = k;
    return ClassId{static_cast<int>(best)};
}

ClassId predict(const TrainedModel& model, const Eigen::VectorXd& features) {
    return argmax_class(predict_proba(model, features));
}

Eigen::MatrixXd predict_proba(const TrainedModel& model, std::span<const Sample> samples) {
    if (samples.empty()) return Eigen::MatrixXd(model.num_classes(), 0);
    const DesignMatrix data = design_matrix(samples);
    check_dim(model, data.x.rows());
    return model.network.probabilities(data.x);
}

std::vector<ClassId> predict(const TrainedModel& model, std::span<const Sample> samples) {
    const Eigen::MatrixXd proba = predict_proba(model, samples);
    std::vector<ClassId> out;
    out.reserve(samples.size());
    for (Eigen::Index c = 0; c < proba.cols(); ++c) out.push_back(argmax_class(proba.col(c)));
    return out;
}

double gradient_check(const LearnerConfig& config, std::span<const Sample> batch, int num_classes,
                      RandomSource& rng) {
    if (batch.empty()) throw ConfigError("gradient_check: empty batch");
    const DesignMatrix data = design_matrix(batch);
    if ((data.labels.array() < 0).any() || (data.labels.array() >= num_classes).any())
        throw ConfigError("gradient_check: batch label outside the class range");

    auto net = Network<double>::zeros(config.kind, static_cast<int>(data.x.rows()),
                                      config.hidden_units, num_classes);
    Eigen::VectorXd point(net.parameter_count());
    for (Eigen::Index k = 0; k < point.size(); ++k) point[k] = rng.uniform(-0.5, 0.5);
    net.assign(point);

    Network<double> grad;
    net.loss_and_gradient(data.x, data.labels, grad);
    const Eigen::VectorXd analytic = grad.flatten();

    double worst = 0.0;
    Network<double> probe = net;
    for (Eigen::Index k = 0; k < point.size(); ++k) {
        Eigen::VectorXd shifted = point;
        shifted[k] = point[k] + kGradientCheckStep;
        probe.assign(shifted);
        const double up = probe.loss(data.x, data.labels);
        shifted[k] = point[k] - kGradientCheckStep;
        probe.assign(shifted);
        const double down = probe.loss(data.x, data.labels);
        const double numeric = (up - down) / (2.0 * kGradientCheckStep);
        const double a = analytic[k];
        const double denom = std::max({std::abs(a), std::abs(numeric), kGradientCheckFloor});
        worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    return worst;
}

double gradient_norm(const Network<double>& network, std::span<const Sample> batch) {
    const DesignMatrix data = design_matrix(batch);
    Network<double> grad;
    network.loss_and_gradient(data.x, data.labels, grad);
    return grad.flatten().norm();
}

}  // namespace activepool
