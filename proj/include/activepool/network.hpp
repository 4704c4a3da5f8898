#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "activepool/random.hpp"

namespace activepool {

enum class LearnerKind { softmax_linear, mlp };

// Samples are stored column-wise: X is (features x samples), logits are
// (classes x samples).
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct DenseLayer {
    MatrixX<Scalar> weight;  // out x in
    VectorX<Scalar> bias;    // out
};

// Column-wise softmax with max subtraction.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_columns(const Eigen::MatrixBase<Derived>& logits) {
    using Scalar = typename Derived::Scalar;
    MatrixX<Scalar> out = logits;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        auto col = out.col(c);
        col.array() -= col.maxCoeff();
        col = col.array().exp().matrix();
        col /= col.sum();
    }
    return out;
}

// Per-column log-sum-exp.
template <typename Derived>
VectorX<typename Derived::Scalar> log_sum_exp_columns(const Eigen::MatrixBase<Derived>& logits) {
    using Scalar = typename Derived::Scalar;
    VectorX<Scalar> out(logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const Scalar m = logits.col(c).maxCoeff();
        out[c] = m + std::log((logits.col(c).array() - m).exp().sum());
    }
    return out;
}

// Feed-forward classifier: a single affine layer (softmax_linear) or
// affine-tanh-affine (mlp), followed by softmax.
template <typename Scalar>
class Network {
public:
    Network() = default;

    static Network zeros(LearnerKind kind, int inputs, int hidden, int classes) {
        Network net;
        net.kind_ = kind;
        auto add = [&](int out, int in) {
            net.layers_.push_back(
                {MatrixX<Scalar>::Zero(out, in), VectorX<Scalar>::Zero(out)});
        };
        if (kind == LearnerKind::mlp) {
            add(hidden, inputs);
            add(classes, hidden);
        } else {
            add(classes, inputs);
        }
        return net;
    }

    // Weights uniform in [-scale, scale], biases zero.
    static Network random(LearnerKind kind, int inputs, int hidden, int classes, double scale,
                          RandomSource& rng) {
        Network net = zeros(kind, inputs, hidden, classes);
        for (auto& layer : net.layers_)
            for (Eigen::Index k = 0; k < layer.weight.size(); ++k)
                layer.weight.data()[k] = static_cast<Scalar>(rng.uniform(-scale, scale));
        return net;
    }

    LearnerKind kind() const { return kind_; }
    int inputs() const { return static_cast<int>(layers_.front().weight.cols()); }
    int classes() const { return static_cast<int>(layers_.back().weight.rows()); }
    int hidden() const {
        return kind_ == LearnerKind::mlp ? static_cast<int>(layers_.front().weight.rows()) : 0;
    }
    std::vector<DenseLayer<Scalar>>& layers() { return layers_; }
    const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }

    bool same_shape(const Network& other) const {
        if (kind_ != other.kind_ || layers_.size() != other.layers_.size()) return false;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (layers_[i].weight.rows() != other.layers_[i].weight.rows() ||
                layers_[i].weight.cols() != other.layers_[i].weight.cols())
                return false;
        }
        return true;
    }

    Eigen::Index parameter_count() const {
        Eigen::Index n = 0;
        for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
        return n;
    }

    // Layer-major, weights (column-major) then bias.
    VectorX<Scalar> flatten() const {
        VectorX<Scalar> out(parameter_count());
        Eigen::Index at = 0;
        for (const auto& l : layers_) {
            out.segment(at, l.weight.size()) = l.weight.reshaped();
            at += l.weight.size();
            out.segment(at, l.bias.size()) = l.bias;
            at += l.bias.size();
        }
        return out;
    }

    void assign(const VectorX<Scalar>& flat) {
        if (flat.size() != parameter_count())
            throw std::invalid_argument("Network::assign: parameter count mismatch");
        Eigen::Index at = 0;
        for (auto& l : layers_) {
            l.weight.reshaped() = flat.segment(at, l.weight.size());
            at += l.weight.size();
            l.bias = flat.segment(at, l.bias.size());
            at += l.bias.size();
        }
    }

    bool all_finite() const {
        for (const auto& l : layers_)
            if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
        return true;
    }

    template <typename Derived>
    MatrixX<Scalar> logits(const Eigen::MatrixBase<Derived>& x) const {
        MatrixX<Scalar> a = x.template cast<Scalar>();
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            MatrixX<Scalar> z = layers_[i].weight * a;
            z.colwise() += layers_[i].bias;
            a = (i + 1 < layers_.size()) ? MatrixX<Scalar>(z.array().tanh().matrix()) : z;
        }
        return a;
    }

    template <typename Derived>
    MatrixX<Scalar> probabilities(const Eigen::MatrixBase<Derived>& x) const {
        return softmax_columns(logits(x));
    }

    // Mean cross-entropy over the columns of x.
    template <typename Derived>
    Scalar loss(const Eigen::MatrixBase<Derived>& x, const Eigen::VectorXi& labels) const {
        const MatrixX<Scalar> z = logits(x);
        const VectorX<Scalar> lse = log_sum_exp_columns(z);
        Scalar total = 0;
        for (Eigen::Index c = 0; c < z.cols(); ++c) total += lse[c] - z(labels[c], c);
        return total / static_cast<Scalar>(z.cols());
    }

    // Mean cross-entropy and its gradient (same layout as *this).
    template <typename Derived>
    Scalar loss_and_gradient(const Eigen::MatrixBase<Derived>& x, const Eigen::VectorXi& labels,
                             Network& grad) const {
        const Eigen::Index n = x.cols();
        std::vector<MatrixX<Scalar>> activations;
        activations.reserve(layers_.size() + 1);
        activations.push_back(x.template cast<Scalar>());
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            MatrixX<Scalar> z = layers_[i].weight * activations.back();
            z.colwise() += layers_[i].bias;
            if (i + 1 < layers_.size()) z = z.array().tanh().matrix();
            activations.push_back(std::move(z));
        }
        const MatrixX<Scalar>& z = activations.back();
        const VectorX<Scalar> lse = log_sum_exp_columns(z);
        Scalar total = 0;
        for (Eigen::Index c = 0; c < n; ++c) total += lse[c] - z(labels[c], c);

        // dL/dz = (softmax - onehot) / n
        MatrixX<Scalar> delta = softmax_columns(z);
        for (Eigen::Index c = 0; c < n; ++c) delta(labels[c], c) -= Scalar(1);
        delta /= static_cast<Scalar>(n);

        grad.kind_ = kind_;
        grad.layers_.resize(layers_.size());
        for (std::size_t i = layers_.size(); i-- > 0;) {
            const MatrixX<Scalar>& input = activations[i];
            grad.layers_[i].weight = delta * input.transpose();
            grad.layers_[i].bias = delta.rowwise().sum();
            if (i > 0) {
                MatrixX<Scalar> back = layers_[i].weight.transpose() * delta;
                delta = (back.array() * (Scalar(1) - input.array().square())).matrix();
            }
        }
        return total / static_cast<Scalar>(n);
    }

private:
    LearnerKind kind_ = LearnerKind::softmax_linear;
    std::vector<DenseLayer<Scalar>> layers_;
};

}  // namespace activepool
