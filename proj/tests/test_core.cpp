#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "activepool/core.hpp"
#include "fixtures.hpp"

using namespace activepool;

TEST(RandomSource, SameSeedSameStream) {
    RandomSource a(42), b(42);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomSource, MatchesStandardEngine) {
    // mt19937_64's 10000th output is fixed by the standard.
    RandomSource r(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = r.next_u64();
    EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(RandomSource, UniformIndexInRange) {
    RandomSource r(1);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto k = r.uniform_index(7);
        ASSERT_LT(k, 7u);
        ++hits[k];
    }
    for (int h : hits) EXPECT_GT(h, 800);
}

TEST(RandomSource, Uniform01HalfOpen) {
    RandomSource r(9);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RandomSource, NormalMoments) {
    RandomSource r(11);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(RandomSource, DeriveIgnoresConsumption) {
    RandomSource a(3), b(3);
    for (int i = 0; i < 50; ++i) b.next_u64();
    auto ca = a.derive({1, 2});
    auto cb = b.derive({1, 2});
    EXPECT_EQ(ca.next_u64(), cb.next_u64());
    EXPECT_NE(a.derive({1, 2}).next_u64(), a.derive({2, 1}).next_u64());
}

TEST(RandomSource, ShuffleIsPermutation) {
    RandomSource r(4);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    r.shuffle(std::span<int>(v));
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(DatasetBundle, RejectsBadInput) {
    auto cls = fixture::classes(2);
    EXPECT_THROW(DatasetBundle(fixture::classes(1), {}, {}, {}), ConfigError);
    EXPECT_THROW(DatasetBundle(cls, {fixture::sample("a", 2, {0.0})}, {}, {}), ConfigError);
    EXPECT_THROW(DatasetBundle(cls, {fixture::sample("a", 0, {0.0}), fixture::sample("b", 1, {0.0, 1.0})}, {}, {}),
                 ConfigError);
    EXPECT_THROW(DatasetBundle(cls, {fixture::sample("a", 0, {std::nan("")})}, {}, {}), ConfigError);
    // disjoint by id across splits
    EXPECT_THROW(DatasetBundle(cls, {fixture::sample("a", 0, {0.0})}, {fixture::sample("a", 1, {0.0})}, {}),
                 ConfigError);
}

TEST(DatasetBundle, CountsPerSplit) {
    DatasetBundle b(fixture::classes(3), fixture::labeled("tr", {2, 0, 5}), fixture::labeled("va", {1, 1, 1}),
                    fixture::labeled("te", {0, 4, 0}));
    EXPECT_EQ(b.feature_dim(), 1);
    EXPECT_EQ(b.class_counts(b.train()), (std::vector<std::size_t>{2, 0, 5}));
    EXPECT_EQ(b.class_counts(b.test()), (std::vector<std::size_t>{0, 4, 0}));
}

TEST(SplitInitial, FourPerClass) {
    const auto train = fixture::labeled("x", {10, 10, 10});
    RandomSource r1(17), r2(17);
    auto a = split_initial(train, 3, 4, r1);
    auto b = split_initial(train, 3, 4, r2);
    EXPECT_EQ(a.training.size(), 12u);
    EXPECT_EQ(a.training.counts(), (std::vector<std::size_t>{4, 4, 4}));
    EXPECT_EQ(a.pools.remaining(), (std::vector<std::size_t>{6, 6, 6}));
    ASSERT_EQ(a.training.size(), b.training.size());
    for (std::size_t i = 0; i < a.training.size(); ++i)
        EXPECT_EQ(a.training.samples()[i].id, b.training.samples()[i].id);

    std::set<std::string> ids;
    for (const auto& s : a.training.samples()) ids.insert(s.id);
    for (int c = 0; c < 3; ++c)
        for (const auto& s : a.pools.view(ClassId{c})) EXPECT_TRUE(ids.insert(s.id).second);
    EXPECT_EQ(ids.size(), train.size());
}

TEST(SplitInitial, ZeroInitialKeepsEverythingInPools) {
    const auto train = fixture::labeled("x", {3, 5});
    RandomSource r(1);
    auto s = split_initial(train, 2, 0, r);
    EXPECT_TRUE(s.training.empty());
    EXPECT_EQ(s.pools.total_remaining(), 8u);
}

TEST(SplitInitial, ShortClassContributesAll) {
    const auto train = fixture::labeled("x", {2, 9});
    RandomSource r(1);
    auto s = split_initial(train, 2, 5, r);
    EXPECT_EQ(s.training.counts(), (std::vector<std::size_t>{2, 5}));
    ASSERT_EQ(s.short_classes.size(), 1u);
    EXPECT_EQ(s.short_classes[0], ClassId{0});
}

TEST(SplitInitial, EmptyTrainIsConfigError) {
    RandomSource r(1);
    EXPECT_THROW(split_initial({}, 2, 1, r), ConfigError);
}

TEST(SplitInitial, DifferentSeedsDifferentMembership) {
    const auto train = fixture::labeled("x", {50, 50});
    RandomSource r1(1), r2(2);
    auto a = split_initial(train, 2, 10, r1);
    auto b = split_initial(train, 2, 10, r2);
    bool differs = false;
    for (std::size_t i = 0; i < a.training.size(); ++i)
        differs |= a.training.samples()[i].id != b.training.samples()[i].id;
    EXPECT_TRUE(differs);
}

TEST(DrawFromPool, Counting) {
    ClassPools pools(2);
    pools.stock(ClassId{0}, fixture::labeled("p", {6}));
    auto d = draw_from_pool(pools, ClassId{0}, 4);
    EXPECT_EQ(d.samples.size(), 4u);
    EXPECT_EQ(d.shortfall(), 0u);
    EXPECT_EQ(pools.remaining(ClassId{0}), 2u);
}

TEST(DrawFromPool, ZeroIsIdentity) {
    ClassPools pools(1);
    pools.stock(ClassId{0}, fixture::labeled("p", {6}));
    auto d = draw_from_pool(pools, ClassId{0}, 0);
    EXPECT_TRUE(d.samples.empty());
    EXPECT_EQ(pools.remaining(ClassId{0}), 6u);
}

TEST(DrawFromPool, ShortfallEmptiesPool) {
    ClassPools pools(1);
    pools.stock(ClassId{0}, fixture::labeled("p", {3}));
    auto d = draw_from_pool(pools, ClassId{0}, 5);
    EXPECT_EQ(d.samples.size(), 3u);
    EXPECT_EQ(d.requested, 5u);
    EXPECT_EQ(d.shortfall(), 2u);
    EXPECT_EQ(pools.remaining(ClassId{0}), 0u);
}

TEST(DrawFromPool, UnknownClass) {
    ClassPools pools(2);
    EXPECT_THROW(draw_from_pool(pools, ClassId{2}, 1), ConfigError);
    EXPECT_THROW(draw_from_pool(pools, ClassId{-1}, 1), ConfigError);
}

TEST(DrawFromPool, UniformOverPositions) {
    // Each of 5 samples should be first-drawn about equally often.
    std::vector<int> first(5, 0);
    for (std::uint64_t seed = 0; seed < 5000; ++seed) {
        RandomSource r(seed);
        auto s = split_initial(fixture::labeled("p", {5}), 2, 0, r);
        auto d = draw_from_pool(s.pools, ClassId{0}, 1);
        const auto& id = d.samples[0].id;
        ++first[id.back() - '0'];
    }
    for (int f : first) EXPECT_NEAR(f, 1000, 150);
}

TEST(ClassPools, GiveBackRestoresStock) {
    ClassPools pools(2);
    pools.stock(ClassId{0}, fixture::labeled("a", {4}));
    pools.stock(ClassId{1}, fixture::labeled("b", {0, 3}));
    auto d0 = pools.draw(ClassId{0}, 2);
    auto d1 = pools.draw(ClassId{1}, 3);
    SampleSet back = d0.samples;
    back.insert(back.end(), d1.samples.begin(), d1.samples.end());
    RandomSource r(5);
    pools.give_back(back, r);
    EXPECT_EQ(pools.remaining(), (std::vector<std::size_t>{4, 3}));
}

TEST(ClassBalance, Examples) {
    const std::vector<std::size_t> five(5, 25000);
    const auto d = class_balance(five);
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(d[i], 0.2);
    const std::vector<std::size_t> a{10, 30};
    EXPECT_DOUBLE_EQ(class_balance(a)[0], 0.25);
    EXPECT_DOUBLE_EQ(class_balance(a)[1], 0.75);
    const std::vector<std::size_t> b{1, 0, 0};
    EXPECT_EQ(class_balance(b), Eigen::Vector3d(1, 0, 0));
}

TEST(ClassBalance, EmptyIsUndefined) {
    TrainingSet ts(3);
    EXPECT_THROW(class_balance(ts), UndefinedBalanceError);
}

TEST(ClassBalance, SumsToOne) {
    RandomSource r(8);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::size_t> counts(1 + r.uniform_index(8));
        for (auto& c : counts) c = r.uniform_index(1000);
        counts[0] += 1;
        const auto d = class_balance(counts);
        EXPECT_NEAR(d.sum(), 1.0, 1e-12);
        EXPECT_TRUE((d.array() >= 0.0).all() && (d.array() <= 1.0).all());
    }
}

TEST(TrainingSet, CountsTrackAppends) {
    TrainingSet ts(3);
    ts.append(fixture::labeled("a", {1, 2, 0}));
    ts.append(fixture::sample("z", 2, {0.0}));
    EXPECT_EQ(ts.size(), 4u);
    EXPECT_EQ(ts.counts(), (std::vector<std::size_t>{1, 2, 1}));
    EXPECT_THROW(ts.append(fixture::sample("q", 3, {0.0})), ConfigError);
}
