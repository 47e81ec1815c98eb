#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <ipsketch/serialize.hpp>

#include "fixtures.hpp"

using namespace ipsketch;

namespace {

std::vector<AnySketch> sample_sketches(const SparseVector& a) {
    std::vector<AnySketch> out;
    out.push_back(mh_sketch(a, 33, 4));
    out.push_back(wmh_sketch(a, 33, 4, 100000, Strategy::fast, warn_quietly));
    out.push_back(wmh_sketch(a, 33, 4, 5000, Strategy::exact, warn_quietly));
    out.push_back(kmv_sketch(a, 10, 4));
    out.push_back(kmv_sketch(a, 500, 4));
    out.push_back(jl_sketch(a, 33, 4));
    out.push_back(cs_sketch(a, 11, 3, 4));
    out.push_back(EmptySketch{Method::wmh, a.dim(), 33, 100000, 0, 4, Strategy::fast});
    return out;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / (std::string("ipsketch_test_") + name);
}

} // namespace

TEST(Serialize, BinaryRoundTripIsExact) {
    std::mt19937_64 rng(31);
    const auto a = fixtures::random_vector(rng, 200, 0.2);
    for (const auto& s : sample_sketches(a)) {
        const auto bytes = serialize(s);
        EXPECT_EQ(bytes.substr(0, 4), "IPSK");
        EXPECT_EQ(deserialize(bytes), s);
        EXPECT_EQ(serialize(deserialize(bytes)), bytes);
    }
}

TEST(Serialize, JsonRoundTripIsExact) {
    std::mt19937_64 rng(32);
    const auto a = fixtures::random_vector(rng, 200, 0.2);
    for (const auto& s : sample_sketches(a)) {
        const auto j = to_json(s);
        EXPECT_EQ(from_json(nlohmann::json::parse(j.dump())), s);
        EXPECT_EQ(j.at("prime").get<std::uint64_t>(), kPrime);
        EXPECT_EQ(j.at("prng").get<std::string>(), "SPLMX64C");
    }
}

TEST(Serialize, HeaderLayout) {
    const auto s = mh_sketch(SparseVector(9, {{2, 1.0}}), 3, 0x0102030405060708ULL);
    const auto bytes = serialize(s);
    ASSERT_EQ(bytes.size(), kHeaderSize + 2 * 3 * 8);
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1); // version, little-endian
    EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 0);
    EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 1); // MH
    EXPECT_EQ(static_cast<unsigned char>(bytes[9]), 9); // n
    EXPECT_EQ(static_cast<unsigned char>(bytes[41]), 0x08); // seed low byte
    EXPECT_EQ(bytes.substr(57, 8), "SPLMX64C");
}

TEST(Serialize, RejectsCorruptInput) {
    const auto good = serialize(jl_sketch(SparseVector(5, {{1, 1.0}}), 4, 1));
    EXPECT_THROW(deserialize(good.substr(0, good.size() - 1)), InvalidInput);
    EXPECT_THROW(deserialize(good + "x"), InvalidInput);
    EXPECT_THROW(deserialize(""), InvalidInput);
    auto bad = good;
    bad[0] = 'X';
    EXPECT_THROW(deserialize(bad), InvalidInput);
    bad = good;
    bad[4] = 9;
    EXPECT_THROW(deserialize(bad), InvalidInput);
    bad = good;
    bad[6] = 42;
    EXPECT_THROW(deserialize(bad), InvalidInput);
    bad = good;
    bad[49] ^= 1; // prime
    EXPECT_THROW(deserialize(bad), InvalidInput);
    bad = good;
    bad[57] = 'Z'; // prng id
    EXPECT_THROW(deserialize(bad), InvalidInput);
    bad = good;
    bad[17] = 100; // m larger than the payload
    EXPECT_THROW(deserialize(bad), InvalidInput);
    EXPECT_THROW(from_json(nlohmann::json{{"magic", "IPSK"}}), InvalidInput);
}

TEST(Serialize, EstimatesSurviveRoundTripBitExactly) {
    std::mt19937_64 rng(33);
    const auto a = fixtures::random_vector(rng, 300, 0.3);
    const auto b = fixtures::random_vector(rng, 300, 0.3);
    const auto sa = sample_sketches(a), sb = sample_sketches(b);
    for (std::size_t i = 0; i + 1 < sa.size(); ++i) {
        const double direct = estimate(sa[i], sb[i]);
        EXPECT_EQ(estimate(deserialize(serialize(sa[i])), deserialize(serialize(sb[i]))), direct);
        EXPECT_EQ(estimate(from_json(to_json(sa[i])), from_json(to_json(sb[i]))), direct);
    }
}

TEST(Serialize, FilesInBothFormats) {
    const auto s = wmh_sketch(SparseVector::from_dense({1, -2, 3}), 16, 2, 1000, Strategy::fast, warn_quietly);
    const AnySketch any = s;
    const auto pb = temp_file("bin"), pj = temp_file("json");
    save_sketch(pb.string(), any, SketchFormat::binary);
    save_sketch(pj.string(), any, SketchFormat::json);
    EXPECT_EQ(load_sketch(pb.string()), any);
    EXPECT_EQ(load_sketch(pj.string()), any);
    std::filesystem::remove(pb);
    std::filesystem::remove(pj);
    EXPECT_THROW(load_sketch(temp_file("missing").string()), InvalidInput);
}

TEST(StorageSize, Accounting) {
    EXPECT_EQ(storage_size(SketchParams{Method::jl, 10, 400}), 400.0);
    EXPECT_EQ(storage_size(SketchParams{Method::mh, 10, 400}), 600.0);
    EXPECT_EQ(storage_size(SketchParams{Method::kmv, 10, 400}), 600.0);
    EXPECT_EQ(storage_size(SketchParams{Method::wmh, 10, 400, 1000}), 601.0);
    EXPECT_EQ(storage_size(SketchParams{Method::cs, 10, 80, 0, 5}), 400.0);
}

TEST(AnySketchEstimate, MixedMethodsAndEmptySketches) {
    const auto a = SparseVector::from_dense({1, 2});
    const AnySketch mh = mh_sketch(a, 8, 1), jl = jl_sketch(a, 8, 1);
    EXPECT_THROW(estimate(mh, jl), InvalidInput);
    const SketchParams p{Method::wmh, 2, 8, 1000, 0, 1, Strategy::fast};
    const AnySketch empty = make_sketch(SparseVector(2, {}), p);
    EXPECT_TRUE(is_empty_sketch(empty));
    const AnySketch full = make_sketch(a, p, warn_quietly);
    EXPECT_EQ(estimate(empty, full), 0.0);
    SketchParams q = p;
    q.seed = 2;
    EXPECT_THROW(estimate(empty, make_sketch(a, q, warn_quietly)), InvalidInput);
}
