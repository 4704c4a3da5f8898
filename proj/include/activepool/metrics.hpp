#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "activepool/core.hpp"

namespace activepool {

class EvaluationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rows are true classes, columns predicted classes.
using ConfusionMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double fnr = 0.0;
    std::int64_t support = 0;
};

// All values are fractions in [0, 1].
struct MetricsReport {
    std::vector<ClassMetrics> per_class;
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;

    Eigen::VectorXd fnr() const;
    Eigen::VectorXd f1() const;
};

ConfusionMatrix confusion(std::span<const ClassId> true_labels,
                          std::span<const ClassId> predicted_labels, int num_classes);

// Zero-denominator convention: any ratio with a zero denominator is 0.
MetricsReport report(const ConfusionMatrix& cm);

}  // namespace activepool
