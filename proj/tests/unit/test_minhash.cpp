#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <ipsketch/minhash.hpp>
#include <ipsketch/tables.hpp>

#include "fixtures.hpp"

using namespace ipsketch;

TEST(MhSketch, SingleNonzeroAlwaysSampled) {
    const SparseVector a(50, {{17, -3.5}});
    const auto s = mh_sketch(a, 100, 9);
    for (double v : s.sampled_vals) EXPECT_EQ(v, -3.5);
    for (double h : s.hash_mins) {
        EXPECT_GT(h, 0.0);
        EXPECT_LE(h, 1.0);
    }
}

TEST(MhSketch, DeterministicAndValidated) {
    const auto a = SparseVector::from_dense({1, 0, 2, 3});
    EXPECT_EQ(mh_sketch(a, 64, 5), mh_sketch(a, 64, 5));
    EXPECT_NE(mh_sketch(a, 64, 5), mh_sketch(a, 64, 6));
    EXPECT_THROW(mh_sketch(SparseVector(4, {}), 10, 1), InvalidInput);
    EXPECT_THROW(mh_sketch(a, 0, 1), InvalidInput);
}

TEST(MhSketch, SampledValuesComeFromTheVector) {
    std::mt19937_64 rng(3);
    const auto a = fixtures::random_vector(rng, 200, 0.2);
    const auto s = mh_sketch(a, 500, 1);
    for (double v : s.sampled_vals) {
        bool found = false;
        for (const auto& e : a.entries()) found |= (e.value == v);
        EXPECT_TRUE(found);
    }
}

TEST(MhSketch, ArgminUniformOnSmallSupport) {
    const auto a = SparseVector::from_dense({1, 2, 3, 4});
    const auto s = mh_sketch(a, 10000, 77);
    std::map<double, int> wins;
    for (double v : s.sampled_vals) ++wins[v];
    ASSERT_EQ(wins.size(), 4u);
    for (const auto& [v, c] : wins) EXPECT_NEAR(c / 10000.0, 0.25, 0.015) << "value " << v;
}

TEST(UnionEstimate, ConstantMinimaArithmetic) {
    MinHashSketch a{4, 10, 1, std::vector<double>(10, 0.5), std::vector<double>(10, 1.0)};
    MinHashSketch b = a;
    b.hash_mins.assign(10, 0.75);
    EXPECT_DOUBLE_EQ(union_estimate(a, b), 1.0);
}

TEST(UnionEstimate, SelfUnionOfHundred) {
    std::vector<std::uint64_t> sup;
    for (std::uint64_t i = 1; i <= 100; ++i) sup.push_back(i * 7);
    const auto a = fixtures::indicator(1000, sup);
    int ok = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto s = mh_sketch(a, 10000, t);
        const double u = union_estimate(s, s);
        ok += (u >= 95.0 && u <= 105.0);
    }
    EXPECT_GE(ok, 9);
}

TEST(UnionEstimate, SingletonUnion) {
    const auto a = SparseVector(10, {{3, 2.0}});
    const auto s = mh_sketch(a, 10000, 4);
    const double u = union_estimate(s, s);
    EXPECT_GE(u, 0.8);
    EXPECT_LE(u, 1.25);
}

TEST(UnionEstimate, RejectsMismatchedSketches) {
    const auto a = SparseVector::from_dense({1, 1});
    EXPECT_THROW(union_estimate(mh_sketch(a, 10, 1), mh_sketch(a, 11, 1)), InvalidInput);
    EXPECT_THROW(union_estimate(mh_sketch(a, 10, 1), mh_sketch(a, 10, 2)), InvalidInput);
    EXPECT_THROW(mh_estimate(mh_sketch(a, 10, 1), mh_sketch(SparseVector(3, {{1, 1}}), 10, 1)), InvalidInput);
}

TEST(MhEstimate, DisjointSupportsGiveZero) {
    const auto a = fixtures::indicator(100, {1, 2, 3, 4, 5});
    const auto b = fixtures::indicator(100, {6, 7, 8, 9});
    EXPECT_EQ(mh_estimate(mh_sketch(a, 2000, 3), mh_sketch(b, 2000, 3)), 0.0);
}

TEST(MhEstimate, IdenticalBinaryVectors) {
    const auto a = fixtures::indicator(20, {2, 5, 11, 19});
    int ok = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto s = mh_sketch(a, 10000, 100 + t);
        ok += std::abs(mh_estimate(s, s) - 4.0) <= 0.4;
    }
    EXPECT_GE(ok, 9);
}

TEST(MhEstimate, TableJoinSize) {
    const auto ka = encode_key_indicator(fixtures::table_a());
    const auto kb = encode_key_indicator(fixtures::table_b());
    int ok = 0;
    for (std::uint64_t t = 0; t < 10; ++t)
        ok += std::abs(mh_estimate(mh_sketch(ka, 100000, t), mh_sketch(kb, 100000, t)) - 4.0) <= 0.5;
    EXPECT_GE(ok, 9);
}

TEST(MhEstimate, ScalingBothInputsByTwo) {
    std::mt19937_64 rng(8);
    const auto a = fixtures::random_vector(rng, 60, 0.4);
    const auto b = fixtures::random_vector(rng, 60, 0.4);
    const auto sa = mh_sketch(a, 300, 2), sb = mh_sketch(b, 300, 2);
    const auto sa2 = mh_sketch(a.scaled(2.0), 300, 2), sb2 = mh_sketch(b.scaled(2.0), 300, 2);
    EXPECT_EQ(sa.hash_mins, sa2.hash_mins);
    for (std::size_t i = 0; i < 300; ++i) EXPECT_EQ(sa2.sampled_vals[i], 2.0 * sa.sampled_vals[i]);
    EXPECT_EQ(mh_estimate(sa2, sb2), 4.0 * mh_estimate(sa, sb));
}

TEST(MhCollisions, RateAndConditionalUniformity) {
    // a has values equal to their index so the sampled value identifies the index.
    std::vector<Entry> ea, eb;
    for (std::uint64_t i = 1; i <= 6; ++i) ea.push_back({i, static_cast<double>(i)});
    for (std::uint64_t i = 4; i <= 9; ++i) eb.push_back({i, static_cast<double>(i)});
    const SparseVector a(9, ea), b(9, eb);
    const std::uint64_t m = 100000;
    const auto sa = mh_sketch(a, m, 31), sb = mh_sketch(b, m, 31);
    std::map<double, double> hits;
    double collisions = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (sa.hash_mins[i] != sb.hash_mins[i]) continue;
        ++collisions;
        EXPECT_EQ(sa.sampled_vals[i], sb.sampled_vals[i]);
        ++hits[sa.sampled_vals[i]];
    }
    const double p = 3.0 / 9.0;
    EXPECT_NEAR(collisions / m, p, 3 * std::sqrt(p * (1 - p) / m));
    double chi2 = 0;
    for (double idx : {4.0, 5.0, 6.0}) {
        const double e = collisions / 3.0;
        chi2 += (hits[idx] - e) * (hits[idx] - e) / e;
    }
    EXPECT_EQ(hits.size(), 3u);
    EXPECT_LT(chi2, 13.8); // chi-square, 2 dof, p = 0.001
}

TEST(MhEstimateMedian, SingleAndEqualAndEven) {
    const auto a = fixtures::indicator(10, {1, 2, 3});
    const auto b = fixtures::indicator(10, {2, 3, 4});
    std::vector<std::pair<MinHashSketch, MinHashSketch>> one{{mh_sketch(a, 200, 1), mh_sketch(b, 200, 1)}};
    EXPECT_EQ(mh_estimate_median(one), mh_estimate(one[0].first, one[0].second));
    std::vector<std::pair<MinHashSketch, MinHashSketch>> same(3, one[0]);
    EXPECT_EQ(mh_estimate_median(same), mh_estimate(one[0].first, one[0].second));
    std::vector<std::pair<MinHashSketch, MinHashSketch>> two(2, one[0]);
    EXPECT_THROW(mh_estimate_median(two), InvalidInput);
    EXPECT_THROW(mh_estimate_median({}), InvalidInput);
}

TEST(MhEstimateMedian, BoostingLowersFailureRate) {
    const auto ka = encode_key_indicator(fixtures::table_a());
    const auto kb = encode_key_indicator(fixtures::table_b());
    const std::uint64_t m = 100;
    const double bound = std::sqrt(4.0 * 14.0 / static_cast<double>(m));
    int fail1 = 0, fail9 = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<MinHashSketch, MinHashSketch>> pairs;
        for (std::uint64_t k = 0; k < 9; ++k) {
            const auto s = median_seed(trial, k);
            pairs.emplace_back(mh_sketch(ka, m, s), mh_sketch(kb, m, s));
        }
        fail1 += std::abs(mh_estimate(pairs[0].first, pairs[0].second) - 4.0) > bound;
        fail9 += std::abs(mh_estimate_median(pairs) - 4.0) > bound;
    }
    EXPECT_LT(fail9, fail1);
}

TEST(MhIdealized, TrueUnionIsUnbiased) {
    std::mt19937_64 rng(12);
    for (int pair = 0; pair < 3; ++pair) {
        const auto a = fixtures::random_vector(rng, 8, 0.6);
        const auto b = fixtures::random_vector(rng, 8, 0.6);
        const double uni = static_cast<double>(support_overlap(a, b).second);
        const std::uint64_t m = 100000;
        const auto sa = mh_sketch(a, m, 500 + pair), sb = mh_sketch(b, m, 500 + pair);
        std::vector<double> terms(m);
        for (std::size_t i = 0; i < m; ++i)
            terms[i] = sa.hash_mins[i] == sb.hash_mins[i] ? uni * sa.sampled_vals[i] * sb.sampled_vals[i] : 0.0;
        const double truth = inner(a, b);
        EXPECT_NEAR(fixtures::mean(terms), truth, 3 * fixtures::std_error(terms) + 1e-12);
        EXPECT_NEAR(mh_estimate_with_union(sa, sb, uni), fixtures::mean(terms), 1e-9 * (1 + std::abs(truth)));
    }
}
