#pragma once

#include <string>
#include <vector>

#include "activepool/core.hpp"
#include "activepool/synthgen.hpp"

namespace fixture {

inline activepool::Sample sample(const std::string& id, int label, std::vector<double> f) {
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    return {id, v, activepool::ClassId{label}};
}

// `counts[c]` samples of class c with 1-d features equal to c.
inline activepool::SampleSet labeled(const std::string& prefix, const std::vector<std::size_t>& counts) {
    activepool::SampleSet out;
    for (std::size_t c = 0; c < counts.size(); ++c)
        for (std::size_t k = 0; k < counts[c]; ++k)
            out.push_back(sample(prefix + "-" + std::to_string(c) + "-" + std::to_string(k),
                                 static_cast<int>(c), {static_cast<double>(c)}));
    return out;
}

inline std::vector<activepool::ClassInfo> classes(int n) {
    std::vector<activepool::ClassInfo> out;
    for (int i = 0; i < n; ++i) out.push_back({activepool::ClassId{i}, "c" + std::to_string(i)});
    return out;
}

// Well separated Gaussian clouds: means at 10 * e_i, sigma 0.5.
inline activepool::GeneratorSpec easy_spec(std::vector<std::size_t> train, std::size_t val_per_class,
                                           std::size_t test_per_class, std::uint64_t seed = 3) {
    activepool::GeneratorSpec spec;
    const std::size_t n = train.size();
    for (std::size_t i = 0; i < n; ++i) spec.class_names.push_back("c" + std::to_string(i));
    spec.feature_dim = static_cast<int>(n);
    spec.train_counts = std::move(train);
    spec.val_counts.assign(n, val_per_class);
    spec.test_counts.assign(n, test_per_class);
    spec.placement_scale = 10.0;
    spec.class_sigmas.assign(n, 0.5);
    spec.seed = seed;
    return spec;
}

}  // namespace fixture
