#include "activepool/synthgen.hpp"

#include <cmath>
#include <cstdio>

namespace activepool {

Eigen::MatrixXd GeneratorSpec::means() const {
    if (class_means) return *class_means;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(num_classes(), feature_dim);
    for (int i = 0; i < num_classes(); ++i) m(i, i) = placement_scale;
    return m;
}

void GeneratorSpec::validate() const {
    const auto n = class_names.size();
    if (n < 2) throw ConfigError("generator: need at least two classes");
    if (feature_dim < 1) throw ConfigError("generator: feature_dim must be >= 1");
    if (train_counts.size() != n || val_counts.size() != n || test_counts.size() != n)
        throw ConfigError("generator: per-class count vectors must have one entry per class");
    if (class_sigmas.size() != n)
        throw ConfigError("generator: class_sigmas must have one entry per class");
    for (double s : class_sigmas)
        if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("generator: sigmas must be > 0");
    if (class_means) {
        if (class_means->rows() != static_cast<Eigen::Index>(n) ||
            class_means->cols() != feature_dim)
            throw ConfigError("generator: class_means must be classes x feature_dim");
        if (!class_means->allFinite()) throw ConfigError("generator: class_means must be finite");
    } else {
        if (feature_dim < static_cast<int>(n))
            throw ConfigError("generator: auto-placement needs feature_dim >= number of classes");
        if (!std::isfinite(placement_scale))
            throw ConfigError("generator: placement_scale must be finite");
    }
    std::vector<double> mixed(n, 0.0);
    for (const auto& p : overlap_pairs) {
        if (p.from < 0 || p.from >= static_cast<int>(n) || p.to < 0 || p.to >= static_cast<int>(n))
            throw ConfigError("generator: overlap pair references an unknown class");
        if (!(p.weight >= 0.0 && p.weight <= 1.0))
            throw ConfigError("generator: overlap weights must be in [0, 1]");
        mixed[static_cast<std::size_t>(p.from)] += p.weight;
    }
    for (double w : mixed)
        if (w > 1.0 + 1e-12) throw ConfigError("generator: overlap weights of a class sum above 1");
}

DatasetBundle generate(const GeneratorSpec& spec) {
    spec.validate();
    const Eigen::MatrixXd means = spec.means();
    const int classes = spec.num_classes();
    const RandomSource root(spec.seed);

    auto make_split = [&](const std::vector<std::size_t>& counts, const char* split,
                          std::uint64_t split_tag) {
        SampleSet out;
        for (int c = 0; c < classes; ++c) {
            const std::size_t n = counts[static_cast<std::size_t>(c)];
            RandomSource rng = root.derive({split_tag, static_cast<std::uint64_t>(c)});

            // Source component per sample: own class unless claimed by an overlap pair.
            std::vector<int> source(n, c);
            std::size_t at = 0;
            for (const auto& p : spec.overlap_pairs) {
                if (p.from != c) continue;
                const auto k = static_cast<std::size_t>(std::llround(p.weight * static_cast<double>(n)));
                for (std::size_t m = 0; m < k && at < n; ++m) source[at++] = p.to;
            }
            rng.shuffle(std::span<int>(source));

            for (std::size_t k = 0; k < n; ++k) {
                const int src = source[k];
                const double sigma = spec.class_sigmas[static_cast<std::size_t>(src)];
                Eigen::VectorXd x(spec.feature_dim);
                for (int f = 0; f < spec.feature_dim; ++f) x[f] = means(src, f) + sigma * rng.normal();
                char id[160];
                std::snprintf(id, sizeof id, "%s-%s-%06zu", split,
                              spec.class_names[static_cast<std::size_t>(c)].c_str(), k);
                out.push_back(Sample{id, std::move(x), ClassId{c}});
            }
        }
        return out;
    };

    std::vector<ClassInfo> infos;
    for (int c = 0; c < classes; ++c) infos.push_back({ClassId{c}, spec.class_names[static_cast<std::size_t>(c)]});
    return DatasetBundle(std::move(infos), make_split(spec.train_counts, "train", 1),
                         make_split(spec.val_counts, "val", 2), make_split(spec.test_counts, "test", 3));
}

GeneratorSpec paper_shape_preset(std::uint64_t seed) {
    GeneratorSpec spec;
    spec.class_names = {"blood", "damaged", "muscle", "stroma", "urothelium"};
    spec.feature_dim = 8;
    // Imbalanced class sizes, scaled down by ten below.
    const std::vector<double> train_full = {35105, 65920, 67007, 86978, 91006};
    const std::vector<double> test_full = {4106, 57296, 50347, 79338, 38813};
    for (std::size_t i = 0; i < train_full.size(); ++i) {
        spec.train_counts.push_back(static_cast<std::size_t>(std::llround(train_full[i] / 10.0)));
        spec.test_counts.push_back(static_cast<std::size_t>(std::llround(test_full[i] / 10.0)));
        spec.val_counts.push_back(250);
    }
    spec.placement_scale = 4.0;
    spec.class_sigmas.assign(5, 1.0);
    spec.overlap_pairs = {
        {3, 1, 0.25},  // stroma drawn inside the damaged cloud
        {0, 3, 0.10},  // blood drawn inside the stroma cloud
    };
    spec.seed = seed;
    return spec;
}

}  // namespace activepool
