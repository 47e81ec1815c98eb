#pragma once

// Sketch serialization.
//
// Binary layout (version 1, little-endian, no padding):
//
//   offset  size  field
//   0       4     magic "IPSK"
//   4       2     format version (1)
//   6       1     method tag: 1 MH, 2 WMH, 3 KMV, 4 JL, 5 CS
//   7       1     strategy tag: 0 none, 1 exact, 2 fast
//   8       1     flags: bit 0 set = empty sketch (no payload),
//                 bit 1 set = KMV sample truncated to k
//   9       8     n (dimension)
//   17      8     m (samples, rows, buckets or KMV budget k)
//   25      8     L (0 unless WMH)
//   33      8     r (CountSketch repetitions, 0 otherwise)
//   41      8     master seed
//   49      8     hash prime
//   57      8     PRNG identifier (ASCII, "SPLMX64C")
//   65            payload:
//     MH   m f64 hash values, m f64 sampled values
//     WMH  m f64 hash values, m f64 sampled values, f64 stored norm
//     KMV  u64 count, then count x (f64 hash, u64 index, f64 value)
//     JL   m f64 projected values
//     CS   r*m f64 table entries, row-major
//
// The JSON mirror uses the same field names (see to_json).

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sketch.hpp"

namespace ipsketch {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::array<char, 4> kMagic = {'I', 'P', 'S', 'K'};
inline constexpr std::size_t kHeaderSize = 65;

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(std::string_view s) { out_.append(s); }
    void f64s(const std::vector<double>& xs) {
        for (double x : xs) f64(x);
    }
    std::string take() { return std::move(out_); }

private:
    void le(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(le(8)); }
    std::string_view raw(std::size_t n) {
        need(n);
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::vector<double> f64s(std::uint64_t count) {
        need_items(count, 8);
        std::vector<double> xs(count);
        for (auto& x : xs) x = f64();
        return xs;
    }
    void need_items(std::uint64_t count, std::size_t item_size) {
        if (count > (in_.size() - pos_) / item_size) fail("sketch payload truncated");
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) {
        if (in_.size() - pos_ < n) fail("sketch data truncated");
    }
    std::uint64_t le(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

inline Method method_from_tag(std::uint64_t tag) {
    if (tag < 1 || tag > 5) fail("unknown method tag " + std::to_string(tag));
    return static_cast<Method>(tag);
}

inline Strategy strategy_from_tag(std::uint64_t tag) {
    if (tag > 2) fail("unknown strategy tag " + std::to_string(tag));
    return static_cast<Strategy>(tag);
}

inline void check_wmh_params(const SketchParams& p) {
    if (p.method == Method::wmh) {
        require(p.L >= 1, "weighted MinHash sketch must have L >= 1");
        require(p.strategy != Strategy::none, "weighted MinHash sketch must name a strategy");
    }
}

} // namespace detail

inline std::string serialize(const AnySketch& sketch) {
    const SketchParams p = params_of(sketch);
    detail::ByteWriter w;
    w.raw(std::string_view(kMagic.data(), kMagic.size()));
    w.u16(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(p.method));
    w.u8(static_cast<std::uint8_t>(p.strategy));
    const auto* kmv = std::get_if<KmvSketch>(&sketch);
    w.u8(static_cast<std::uint8_t>((is_empty_sketch(sketch) ? 1 : 0) | (kmv && kmv->truncated ? 2 : 0)));
    w.u64(p.n);
    w.u64(p.m);
    w.u64(p.L);
    w.u64(p.r);
    w.u64(p.seed);
    w.u64(kPrime);
    w.raw(std::string_view(kPrngId, 8));

    std::visit(
        [&w](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MinHashSketch>) {
                w.f64s(s.hash_mins);
                w.f64s(s.sampled_vals);
            } else if constexpr (std::is_same_v<T, WmhSketch>) {
                w.f64s(s.hash_mins);
                w.f64s(s.sampled_vals);
                w.f64(s.stored_norm);
            } else if constexpr (std::is_same_v<T, KmvSketch>) {
                w.u64(s.entries.size());
                for (const auto& e : s.entries) {
                    w.f64(e.hash);
                    w.u64(e.index);
                    w.f64(e.value);
                }
            } else if constexpr (std::is_same_v<T, JlSketch>) {
                w.f64s(s.projected);
            } else if constexpr (std::is_same_v<T, CountSketch>) {
                w.f64s(s.table);
            }
        },
        sketch);
    return w.take();
}

inline AnySketch deserialize(std::string_view bytes) {
    detail::ByteReader rd(bytes);
    if (rd.raw(4) != std::string_view(kMagic.data(), kMagic.size()))
        detail::fail("not a sketch file (bad magic)");
    const auto version = rd.u16();
    if (version != kFormatVersion) detail::fail("unsupported sketch format version " + std::to_string(version));
    SketchParams p;
    p.method = detail::method_from_tag(rd.u8());
    p.strategy = detail::strategy_from_tag(rd.u8());
    const auto flags = rd.u8();
    p.n = rd.u64();
    p.m = rd.u64();
    p.L = rd.u64();
    p.r = rd.u64();
    p.seed = rd.u64();
    if (rd.u64() != kPrime) detail::fail("sketch was built with a different hash prime");
    if (rd.raw(8) != std::string_view(kPrngId, 8)) detail::fail("sketch was built with a different PRNG");
    detail::check_wmh_params(p);

    AnySketch out;
    if (flags & 1) {
        out = EmptySketch{p.method, p.n, p.m, p.L, p.r, p.seed, p.strategy};
    } else {
        switch (p.method) {
        case Method::mh: {
            auto h = rd.f64s(p.m);
            auto v = rd.f64s(p.m);
            out = MinHashSketch{p.n, p.m, p.seed, std::move(h), std::move(v)};
            break;
        }
        case Method::wmh: {
            auto h = rd.f64s(p.m);
            auto v = rd.f64s(p.m);
            const double nrm = rd.f64();
            out = WmhSketch{p.n, p.m, p.L, p.seed, p.strategy, std::move(h), std::move(v), nrm};
            break;
        }
        case Method::kmv: {
            const auto count = rd.u64();
            const bool truncated = flags & 2;
            if (count > p.m) detail::fail("KMV sketch holds more than k entries");
            if (truncated && count != p.m) detail::fail("truncated KMV sketch must hold exactly k entries");
            rd.need_items(count, 24);
            std::vector<KmvEntry> es(count);
            for (auto& e : es) {
                e.hash = rd.f64();
                e.index = rd.u64();
                e.value = rd.f64();
            }
            out = KmvSketch{p.n, p.m, p.seed, std::move(es), truncated};
            break;
        }
        case Method::jl: out = JlSketch{p.n, p.m, p.seed, rd.f64s(p.m)}; break;
        case Method::cs:
            if (p.r != 0 && p.m > std::numeric_limits<std::uint64_t>::max() / p.r)
                detail::fail("CountSketch shape overflows");
            out = CountSketch{p.n, p.m, p.r, p.seed, rd.f64s(p.r * p.m)};
            break;
        }
    }
    if (!rd.done()) detail::fail("trailing bytes after sketch payload");
    return out;
}

// JSON mirror -----------------------------------------------------------------

inline nlohmann::json to_json(const AnySketch& sketch) {
    const SketchParams p = params_of(sketch);
    nlohmann::json j;
    j["magic"] = std::string(kMagic.data(), kMagic.size());
    j["version"] = kFormatVersion;
    j["method"] = std::string(method_name(p.method));
    j["strategy"] = std::string(strategy_name(p.strategy));
    j["empty"] = is_empty_sketch(sketch);
    j["n"] = p.n;
    j["m"] = p.m;
    j["L"] = p.L;
    j["r"] = p.r;
    j["seed"] = p.seed;
    j["prime"] = kPrime;
    j["prng"] = std::string(kPrngId, 8);
    std::visit(
        [&j](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MinHashSketch>) {
                j["hash_mins"] = s.hash_mins;
                j["sampled_vals"] = s.sampled_vals;
            } else if constexpr (std::is_same_v<T, WmhSketch>) {
                j["hash_mins"] = s.hash_mins;
                j["sampled_vals"] = s.sampled_vals;
                j["stored_norm"] = s.stored_norm;
            } else if constexpr (std::is_same_v<T, KmvSketch>) {
                auto arr = nlohmann::json::array();
                for (const auto& e : s.entries)
                    arr.push_back({{"hash", e.hash}, {"index", e.index}, {"value", e.value}});
                j["entries"] = std::move(arr);
                j["truncated"] = s.truncated;
            } else if constexpr (std::is_same_v<T, JlSketch>) {
                j["projected"] = s.projected;
            } else if constexpr (std::is_same_v<T, CountSketch>) {
                j["table"] = s.table;
            }
        },
        sketch);
    return j;
}

inline AnySketch from_json(const nlohmann::json& j) {
    try {
        if (j.at("magic").get<std::string>() != std::string(kMagic.data(), kMagic.size()))
            detail::fail("not a sketch document (bad magic)");
        if (j.at("version").get<int>() != kFormatVersion) detail::fail("unsupported sketch format version");
        if (j.at("prime").get<std::uint64_t>() != kPrime)
            detail::fail("sketch was built with a different hash prime");
        if (j.at("prng").get<std::string>() != std::string(kPrngId, 8))
            detail::fail("sketch was built with a different PRNG");
        SketchParams p;
        p.method = parse_method(j.at("method").get<std::string>());
        p.strategy = parse_strategy(j.at("strategy").get<std::string>());
        p.n = j.at("n").get<std::uint64_t>();
        p.m = j.at("m").get<std::uint64_t>();
        p.L = j.at("L").get<std::uint64_t>();
        p.r = j.at("r").get<std::uint64_t>();
        p.seed = j.at("seed").get<std::uint64_t>();
        detail::check_wmh_params(p);
        if (j.at("empty").get<bool>()) return EmptySketch{p.method, p.n, p.m, p.L, p.r, p.seed, p.strategy};

        auto sized = [&](const char* key, std::uint64_t len) {
            auto v = j.at(key).get<std::vector<double>>();
            if (v.size() != len) detail::fail(std::string("field '") + key + "' has the wrong length");
            return v;
        };
        switch (p.method) {
        case Method::mh: return MinHashSketch{p.n, p.m, p.seed, sized("hash_mins", p.m), sized("sampled_vals", p.m)};
        case Method::wmh:
            return WmhSketch{p.n,         p.m, p.L, p.seed, p.strategy, sized("hash_mins", p.m),
                             sized("sampled_vals", p.m), j.at("stored_norm").get<double>()};
        case Method::kmv: {
            std::vector<KmvEntry> es;
            for (const auto& e : j.at("entries"))
                es.push_back({e.at("hash").get<double>(), e.at("index").get<std::uint64_t>(),
                              e.at("value").get<double>()});
            const bool truncated = j.at("truncated").get<bool>();
            if (es.size() > p.m) detail::fail("KMV sketch holds more than k entries");
            if (truncated && es.size() != p.m) detail::fail("truncated KMV sketch must hold exactly k entries");
            return KmvSketch{p.n, p.m, p.seed, std::move(es), truncated};
        }
        case Method::jl: return JlSketch{p.n, p.m, p.seed, sized("projected", p.m)};
        case Method::cs: return CountSketch{p.n, p.m, p.r, p.seed, sized("table", p.r * p.m)};
        }
    } catch (const nlohmann::json::exception& e) {
        detail::fail(std::string("malformed sketch JSON: ") + e.what());
    }
    detail::fail("unknown sketch method");
}

// Files -----------------------------------------------------------------------

enum class SketchFormat { binary, json };

inline void save_sketch(const std::string& path, const AnySketch& sketch,
                        SketchFormat format = SketchFormat::binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::fail("cannot open '" + path + "' for writing");
    if (format == SketchFormat::binary)
        out << serialize(sketch);
    else
        out << to_json(sketch).dump(1) << '\n';
    if (!out) detail::fail("failed writing '" + path + "'");
}

/// Reads either format; JSON is recognized by a leading '{'.
inline AnySketch load_sketch(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::fail("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto first = bytes.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && bytes[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(bytes);
        } catch (const nlohmann::json::exception& e) {
            detail::fail("'" + path + "' is not valid JSON: " + e.what());
        }
        return from_json(j);
    }
    return deserialize(bytes);
}

} // namespace ipsketch
