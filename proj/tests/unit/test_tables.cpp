#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <ipsketch/tables.hpp>

#include "fixtures.hpp"

using namespace ipsketch;

TEST(KeyedColumn, Validation) {
    EXPECT_THROW(KeyedColumn(10, {1, 2, 2}), InvalidInput);
    EXPECT_THROW(KeyedColumn(10, {0}), InvalidInput);
    EXPECT_THROW(KeyedColumn(10, {11}), InvalidInput);
    EXPECT_THROW(KeyedColumn(10, {1, 2}, std::vector<double>{1.0}), InvalidInput);
    EXPECT_NO_THROW(KeyedColumn(10, {}));
}

TEST(EncodeKeyIndicator, Examples) {
    const auto x = encode_key_indicator(fixtures::table_a());
    EXPECT_EQ(x, fixtures::indicator(16, {1, 3, 4, 5, 6, 7, 8, 9, 11}));
    EXPECT_TRUE(encode_key_indicator(KeyedColumn(5, {})).empty());
    EXPECT_EQ(encode_key_indicator(KeyedColumn(9, {5})), SparseVector(9, {{5, 1.0}}));
}

TEST(EncodeValueColumn, Examples) {
    const auto x = encode_value_column(fixtures::table_a());
    EXPECT_EQ(x, SparseVector::from_dense({6, 0, 2, 6, 1, 4, 2, 2, 8, 0, 3, 0, 0, 0, 0, 0}));
    EXPECT_TRUE(encode_value_column(KeyedColumn(5, {1, 2}, std::vector<double>{0, 0})).empty());
    EXPECT_EQ(encode_value_column(KeyedColumn(9, {4}, std::vector<double>{6.0})), SparseVector(9, {{4, 6.0}}));
    EXPECT_THROW(encode_value_column(KeyedColumn(5, {1})), InvalidInput);
}

TEST(JoinStats, ExactOnSampleTables) {
    const auto s = exact_join_stats(fixtures::table_a(), fixtures::table_b());
    EXPECT_EQ(s.join_size, 4.0);
    EXPECT_EQ(s.sum_a, 12.0);
    ASSERT_TRUE(s.mean_a.has_value());
    EXPECT_EQ(*s.mean_a, 3.0);
    EXPECT_EQ(key_jaccard(fixtures::table_a(), fixtures::table_b()), 4.0 / 14.0);
}

TEST(JoinStats, DisjointKeysUnderSampling) {
    const KeyedColumn a(100, {1, 2, 3}, std::vector<double>{1, 2, 3});
    const KeyedColumn b(100, {50, 60}, std::vector<double>{1, 1});
    for (Method m : {Method::mh, Method::wmh, Method::kmv}) {
        SketchParams p{m, 100, 64, m == Method::wmh ? 100000u : 0u, 0, 3,
                       m == Method::wmh ? Strategy::fast : Strategy::none};
        const auto s = estimate_join_stats(make_sketch(encode_value_column(a), p),
                                           make_sketch(encode_key_indicator(a), p),
                                           make_sketch(encode_key_indicator(b), p));
        EXPECT_EQ(s.join_size, 0.0) << method_name(m);
        EXPECT_FALSE(s.mean_a.has_value());
    }
}

TEST(JoinStats, EmptyColumnsMapToEmptySketches) {
    const KeyedColumn a(100, {1, 2}, std::vector<double>{0, 0});
    const KeyedColumn b(100, {1, 5});
    const SketchParams p{Method::wmh, 100, 32, 100000, 0, 1, Strategy::fast};
    const auto s = estimate_join_stats(make_sketch(encode_value_column(a), p), make_sketch(encode_key_indicator(a), p),
                                       make_sketch(encode_key_indicator(b), p));
    EXPECT_EQ(s.sum_a, 0.0);
    EXPECT_GT(s.join_size, 0.0);
}

TEST(JoinStats, MismatchedSketchesRejected) {
    const auto a = fixtures::table_a(), b = fixtures::table_b();
    const SketchParams p{Method::mh, 16, 64, 0, 0, 1, Strategy::none};
    SketchParams q = p;
    q.seed = 2;
    EXPECT_THROW(estimate_join_stats(make_sketch(encode_value_column(a), p), make_sketch(encode_key_indicator(a), p),
                                     make_sketch(encode_key_indicator(b), q)),
                 InvalidInput);
}

TEST(JoinStats, WeightedSketchJoinSize) {
    const auto a = fixtures::table_a(), b = fixtures::table_b();
    int ok = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const SketchParams p{Method::wmh, 16, 100000, 1000000, 0, t, Strategy::fast};
        const auto s = estimate_join_stats(make_sketch(encode_value_column(a), p),
                                           make_sketch(encode_key_indicator(a), p),
                                           make_sketch(encode_key_indicator(b), p));
        ok += std::abs(s.join_size - 4.0) <= 0.5;
    }
    EXPECT_GE(ok, 9);
}

TEST(EncodingProperties, InnerProductsAreJoinAggregates) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::uint64_t> ka, kb;
        std::vector<double> va;
        for (std::uint64_t k = 1; k <= 50; ++k) {
            if (rng() % 2) {
                ka.push_back(k);
                va.push_back(static_cast<double>(rng() % 100) / 4.0);
            }
            if (rng() % 3 == 0) kb.push_back(k);
        }
        const KeyedColumn a(50, ka, va), b(50, kb);
        double shared = 0, sum = 0;
        for (std::size_t i = 0; i < ka.size(); ++i)
            if (std::find(kb.begin(), kb.end(), ka[i]) != kb.end()) {
                ++shared;
                sum += va[i];
            }
        EXPECT_EQ(inner(encode_key_indicator(a), encode_key_indicator(b)), shared);
        EXPECT_EQ(inner(encode_value_column(a), encode_key_indicator(b)), sum);
    }
}

TEST(Csv, KeyValueAndKeyOnly) {
    std::istringstream kv("key,value\n3, 1.5\n7,-2\n\n");
    const auto c = read_column_csv(kv, {true, false, 10});
    EXPECT_EQ(c.keys(), (std::vector<std::uint64_t>{3, 7}));
    EXPECT_EQ(*c.values(), (std::vector<double>{1.5, -2.0}));
    EXPECT_EQ(c.dim(), 10u);
    std::istringstream k("5\n2\n");
    const auto d = read_column_csv(k);
    EXPECT_FALSE(d.has_values());
    EXPECT_EQ(d.dim(), 5u);
}

TEST(Csv, Errors) {
    std::istringstream bad_key("x,1\n");
    EXPECT_THROW(read_column_csv(bad_key), InvalidInput);
    std::istringstream neg("-3,1\n");
    EXPECT_THROW(read_column_csv(neg), InvalidInput);
    std::istringstream bad_val("3,abc\n");
    EXPECT_THROW(read_column_csv(bad_val), InvalidInput);
    std::istringstream ragged("3,1\n4\n");
    EXPECT_THROW(read_column_csv(ragged), InvalidInput);
    std::istringstream dup("3\n3\n");
    EXPECT_THROW(read_column_csv(dup), InvalidInput);
    std::istringstream too_big("30\n");
    EXPECT_THROW(read_column_csv(too_big, {false, false, 10}), InvalidInput);
}

TEST(Csv, HashedStringKeys) {
    std::istringstream in("alice,3\nbob,4\n");
    const auto c = read_column_csv(in, {false, true, 0});
    EXPECT_EQ(c.dim(), kHashedKeyDomain);
    EXPECT_EQ(c.keys()[0], hash_key("alice"));
    EXPECT_NE(hash_key("alice"), hash_key("bob"));
    EXPECT_GE(hash_key(""), 1u);
    EXPECT_LE(hash_key("zzz"), kHashedKeyDomain);
}
