#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "activepool/core.hpp"

namespace activepool {

// A fraction `weight` of class `from`'s samples is drawn around class `to`'s
// mean (with `to`'s sigma) while keeping label `from`.
struct OverlapPair {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

struct GeneratorSpec {
    std::vector<std::string> class_names;  // length I
    int feature_dim = 2;
    std::vector<std::size_t> train_counts;
    std::vector<std::size_t> val_counts;
    std::vector<std::size_t> test_counts;
    // Explicit I x d means; when absent, mean_i = placement_scale * e_i.
    std::optional<Eigen::MatrixXd> class_means;
    double placement_scale = 10.0;
    std::vector<double> class_sigmas;  // length I
    std::vector<OverlapPair> overlap_pairs;
    std::uint64_t seed = 0;

    int num_classes() const { return static_cast<int>(class_names.size()); }
    Eigen::MatrixXd means() const;
    void validate() const;
};

// Class-conditional isotropic Gaussian clouds, one independent stream per
// (split, class). Sample ids are "<split>-<class>-<k>".
DatasetBundle generate(const GeneratorSpec& spec);

// Five tissue-like classes, about 35k train and 23k test samples,
// 250 validation samples per class, with a hard stroma-like class and
// a blood-like class that is confusable with it.
GeneratorSpec paper_shape_preset(std::uint64_t seed = 7);

}  // namespace activepool
