#include "activepool/metrics.hpp"

#include <string>

namespace activepool {

namespace {

double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Eigen::VectorXd MetricsReport::fnr() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(per_class.size()));
    for (std::size_t i = 0; i < per_class.size(); ++i) out[static_cast<Eigen::Index>(i)] = per_class[i].fnr;
    return out;
}

Eigen::VectorXd MetricsReport::f1() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(per_class.size()));
    for (std::size_t i = 0; i < per_class.size(); ++i) out[static_cast<Eigen::Index>(i)] = per_class[i].f1;
    return out;
}

ConfusionMatrix confusion(std::span<const ClassId> true_labels,
                          std::span<const ClassId> predicted_labels, int num_classes) {
    if (true_labels.size() != predicted_labels.size())
        throw EvaluationError("confusion: " + std::to_string(true_labels.size()) +
                              " true labels but " + std::to_string(predicted_labels.size()) +
                              " predictions");
    if (true_labels.empty()) throw EvaluationError("confusion: no samples to evaluate");
    if (num_classes < 1) throw EvaluationError("confusion: no classes registered");

    ConfusionMatrix cm = ConfusionMatrix::Zero(num_classes, num_classes);
    for (std::size_t k = 0; k < true_labels.size(); ++k) {
        const int t = true_labels[k].index;
        const int p = predicted_labels[k].index;
        if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
            throw EvaluationError("confusion: unknown label at position " + std::to_string(k));
        ++cm(t, p);
    }
    return cm;
}

MetricsReport report(const ConfusionMatrix& cm) {
    if (cm.rows() != cm.cols() || cm.rows() == 0)
        throw EvaluationError("report: confusion matrix must be square and non-empty");
    if ((cm.array() < 0).any()) throw EvaluationError("report: negative confusion count");
    const std::int64_t total = cm.sum();
    if (total == 0) throw EvaluationError("report: confusion matrix has no samples");

    const auto n = cm.rows();
    MetricsReport out;
    out.per_class.resize(static_cast<std::size_t>(n));
    std::int64_t tp_sum = 0;
    std::int64_t fp_sum = 0;
    std::int64_t fn_sum = 0;
    double f1_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::int64_t tp = cm(i, i);
        const std::int64_t fn = cm.row(i).sum() - tp;
        const std::int64_t fp = cm.col(i).sum() - tp;
        auto& m = out.per_class[static_cast<std::size_t>(i)];
        m.support = tp + fn;
        m.precision = ratio(tp, tp + fp);
        m.recall = ratio(tp, tp + fn);
        m.fnr = ratio(fn, tp + fn);
        // F1 from counts rather than from the rounded precision and recall.
        m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn;
        f1_sum += m.f1;
    }
    out.micro_f1 = ratio(2 * tp_sum, 2 * tp_sum + fp_sum + fn_sum);
    out.macro_f1 = f1_sum / static_cast<double>(n);
    out.accuracy = ratio(tp_sum, total);
    return out;
}

}  // namespace activepool
