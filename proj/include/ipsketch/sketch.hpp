#pragma once

// Type-erased sketch handle used by the table layer, the serializer and the CLI.

#include <cstdint>
#include <type_traits>
#include <variant>

#include "baselines.hpp"
#include "common.hpp"
#include "minhash.hpp"
#include "wmh.hpp"

namespace ipsketch {

/// Stand-in for a sketch of an all-zero vector (MinHash-style sketches cannot
/// represent one). Carries the parameters so compatibility is still checked;
/// every estimate against it is 0.
struct EmptySketch {
    Method method = Method::wmh;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t L = 0;
    std::uint64_t r = 0;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::none;

    friend bool operator==(const EmptySketch&, const EmptySketch&) = default;
};

using AnySketch = std::variant<MinHashSketch, WmhSketch, KmvSketch, JlSketch, CountSketch, EmptySketch>;

/// Common header fields of any sketch.
struct SketchParams {
    Method method = Method::mh;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t L = 0; // weighted MinHash only
    std::uint64_t r = 0; // CountSketch only
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::none;

    friend bool operator==(const SketchParams&, const SketchParams&) = default;
};

inline SketchParams params_of(const MinHashSketch& s) { return {Method::mh, s.n, s.m, 0, 0, s.seed, Strategy::none}; }
inline SketchParams params_of(const WmhSketch& s) { return {Method::wmh, s.n, s.m, s.L, 0, s.seed, s.strategy}; }
inline SketchParams params_of(const KmvSketch& s) { return {Method::kmv, s.n, s.k, 0, 0, s.seed, Strategy::none}; }
inline SketchParams params_of(const JlSketch& s) { return {Method::jl, s.n, s.m, 0, 0, s.seed, Strategy::none}; }
inline SketchParams params_of(const CountSketch& s) { return {Method::cs, s.n, s.m, 0, s.r, s.seed, Strategy::none}; }
inline SketchParams params_of(const EmptySketch& s) { return {s.method, s.n, s.m, s.L, s.r, s.seed, s.strategy}; }

inline SketchParams params_of(const AnySketch& s) {
    return std::visit([](const auto& x) { return params_of(x); }, s);
}

inline bool is_empty_sketch(const AnySketch& s) { return std::holds_alternative<EmptySketch>(s); }

/// Storage in 64-bit words: sampling sketches pay 1.5 words per sample (a
/// 64-bit value plus a 32-bit hash), weighted MinHash one more for the norm,
/// linear sketches one word per coordinate.
inline double storage_size(const SketchParams& p) {
    switch (p.method) {
    case Method::mh:
    case Method::kmv: return 1.5 * static_cast<double>(p.m);
    case Method::wmh: return 1.5 * static_cast<double>(p.m) + 1.0;
    case Method::jl: return static_cast<double>(p.m);
    case Method::cs: return static_cast<double>(p.r * p.m);
    }
    return 0.0;
}

inline double storage_size(const AnySketch& s) { return storage_size(params_of(s)); }

/// Sketch of `a` with the given parameters; all-zero vectors give an EmptySketch.
inline AnySketch make_sketch(const SparseVector& a, const SketchParams& p,
                             const WarnFn& warn = warn_to_stderr) {
    detail::require(p.n == 0 || p.n == a.dim(), "sketch dimension does not match the vector");
    SketchParams q = p;
    q.n = a.dim();
    if (q.method != Method::wmh) {
        q.L = 0;
        q.strategy = Strategy::none;
    }
    if (q.method != Method::cs) q.r = 0;
    switch (q.method) {
    case Method::mh:
        if (a.empty()) return EmptySketch{q.method, q.n, q.m, 0, 0, q.seed, Strategy::none};
        return mh_sketch(a, q.m, q.seed);
    case Method::wmh:
        if (a.empty()) return EmptySketch{q.method, q.n, q.m, q.L, 0, q.seed, q.strategy};
        return wmh_sketch(a, q.m, q.seed, q.L, q.strategy, warn);
    case Method::kmv: return kmv_sketch(a, q.m, q.seed);
    case Method::jl: return jl_sketch(a, q.m, q.seed);
    case Method::cs: return cs_sketch(a, q.m, q.r == 0 ? kDefaultCsRepetitions : q.r, q.seed);
    }
    detail::fail("unknown sketch method");
}

namespace detail {
template <class A, class B>
double estimate_same(const A& a, const B& b) {
    if constexpr (!std::is_same_v<A, B>) {
        fail("cannot estimate across different sketch methods");
    } else if constexpr (std::is_same_v<A, MinHashSketch>) {
        return mh_estimate(a, b);
    } else if constexpr (std::is_same_v<A, WmhSketch>) {
        return wmh_estimate(a, b);
    } else if constexpr (std::is_same_v<A, KmvSketch>) {
        return kmv_estimate(a, b);
    } else if constexpr (std::is_same_v<A, JlSketch>) {
        return jl_estimate(a, b);
    } else if constexpr (std::is_same_v<A, CountSketch>) {
        return cs_estimate(a, b);
    } else {
        return 0.0;
    }
}
} // namespace detail

/// Inner-product estimate from two sketches of the same method and parameters.
inline double estimate(const AnySketch& a, const AnySketch& b) {
    const SketchParams pa = params_of(a), pb = params_of(b);
    detail::require(pa.method == pb.method, "cannot estimate across different sketch methods");
    if (is_empty_sketch(a) || is_empty_sketch(b)) {
        detail::require(pa == pb, "sketch parameters differ");
        return 0.0;
    }
    return std::visit([](const auto& x, const auto& y) { return detail::estimate_same(x, y); }, a, b);
}

} // namespace ipsketch
