#pragma once

// Reference implementations used to cross-check the library. They favour
// obviousness over speed and share no code with src/.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "activepool/core.hpp"

namespace oracle {

// Hamilton apportionment handed out one seat at a time: start from the floors
// and repeatedly give a seat to the class whose unrounded quota exceeds its
// seats by the most (first index wins on ties).
inline std::vector<std::size_t> allocate(const std::vector<double>& weights, std::size_t budget,
                                         const std::vector<std::size_t>& pool_remaining) {
    const std::size_t n = weights.size();
    double sum = 0.0;
    for (double w : weights) sum += w;
    std::vector<double> quota(n, 0.0);
    if (sum > 0.0) {
        for (std::size_t i = 0; i < n; ++i) quota[i] = weights[i] * static_cast<double>(budget) / sum;
    } else {
        std::size_t open = 0;
        for (auto r : pool_remaining) open += r > 0;
        if (open == 0) return std::vector<std::size_t>(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (pool_remaining[i] > 0) quota[i] = static_cast<double>(budget) / static_cast<double>(open);
    }
    std::vector<std::size_t> seats(n, 0);
    std::vector<bool> bumped(n, false);
    std::size_t given = 0;
    for (std::size_t i = 0; i < n; ++i) {
        seats[i] = static_cast<std::size_t>(std::floor(quota[i]));
        given += seats[i];
    }
    while (given < budget) {
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (bumped[i]) continue;
            const double gap = quota[i] - static_cast<double>(seats[i]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        ++seats[best];
        bumped[best] = true;
        ++given;
    }
    return seats;
}

struct Tally {
    std::int64_t tp = 0, fp = 0, fn = 0, support = 0;
};

inline std::vector<Tally> tally(const std::vector<int>& truth, const std::vector<int>& pred, int classes) {
    std::vector<Tally> out(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
        auto& t = out[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < truth.size(); ++k) {
            if (truth[k] == c && pred[k] == c) ++t.tp;
            if (truth[k] != c && pred[k] == c) ++t.fp;
            if (truth[k] == c && pred[k] != c) ++t.fn;
            if (truth[k] == c) ++t.support;
        }
    }
    return out;
}

inline double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct ClassScores {
    double precision, recall, f1, fnr;
};

inline ClassScores scores(const Tally& t) {
    const double p = ratio(t.tp, t.tp + t.fp);
    const double r = ratio(t.tp, t.tp + t.fn);
    const double f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    return {p, r, f1, ratio(t.fn, t.fn + t.tp)};
}

// Predicts the class whose training centroid is nearest in Euclidean distance.
class NearestMean {
public:
    NearestMean(const activepool::SampleSet& train, int classes, int dim)
        : means_(Eigen::MatrixXd::Zero(dim, classes)), counts_(classes, 0) {
        for (const auto& s : train) {
            means_.col(s.label.index) += s.features;
            ++counts_[static_cast<std::size_t>(s.label.index)];
        }
        for (int c = 0; c < classes; ++c)
            if (counts_[static_cast<std::size_t>(c)] > 0) means_.col(c) /= counts_[static_cast<std::size_t>(c)];
    }

    int predict(const Eigen::VectorXd& x) const {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < means_.cols(); ++c) {
            if (counts_[static_cast<std::size_t>(c)] == 0) continue;
            const double d = (means_.col(c) - x).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    }

private:
    Eigen::MatrixXd means_;
    std::vector<int> counts_;
};

}  // namespace oracle
