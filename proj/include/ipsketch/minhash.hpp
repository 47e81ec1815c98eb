#pragma once

// Unweighted MinHash augmented with the value at the argmin, its union-size
// estimator and the inner-product estimator built on top of both.

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "common.hpp"
#include "hashing.hpp"
#include "sparse_vector.hpp"

namespace ipsketch {

struct MinHashSketch {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
    std::vector<double> hash_mins;    // in (0, 1]
    std::vector<double> sampled_vals; // a[argmin] per repetition

    friend bool operator==(const MinHashSketch&, const MinHashSketch&) = default;
};

inline MinHashSketch mh_sketch(const SparseVector& a, std::uint64_t m, std::uint64_t seed) {
    detail::require(m >= 1, "sample count m must be >= 1");
    detail::require(!a.empty(), "cannot MinHash an all-zero vector");
    const auto& entries = a.entries();
    std::vector<std::uint64_t> keys(entries.size());
    for (std::size_t j = 0; j < entries.size(); ++j) keys[j] = scramble_index(entries[j].index);

    MinHashSketch s{a.dim(), m, seed, std::vector<double>(m), std::vector<double>(m)};
    for (std::uint64_t i = 0; i < m; ++i) {
        const HashFn h = make_hash({seed, i + 1});
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < keys.size(); ++j) {
            const std::uint64_t r = h.raw_key(keys[j]);
            if (r < best) {
                best = r;
                arg = j;
            }
        }
        s.hash_mins[i] = h.to_unit(best);
        s.sampled_vals[i] = entries[arg].value;
    }
    return s;
}

namespace detail {
inline void require_compatible(const MinHashSketch& a, const MinHashSketch& b) {
    require(a.m == b.m, "MinHash sketches differ in sample count");
    require(a.seed == b.seed, "MinHash sketches were built with different seeds");
    require(a.n == b.n, "MinHash sketches differ in dimension");
    require(a.hash_mins.size() == a.m && b.hash_mins.size() == b.m &&
                a.sampled_vals.size() == a.m && b.sampled_vals.size() == b.m,
            "malformed MinHash sketch");
}

inline double sum_pairwise_min(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::min(x[i], y[i]);
    return s;
}
} // namespace detail

/// m / sum_i min(Ha.hash[i], Hb.hash[i]) - 1, an estimate of |A u B|.
inline double union_estimate(const MinHashSketch& ha, const MinHashSketch& hb) {
    detail::require_compatible(ha, hb);
    return static_cast<double>(ha.m) / detail::sum_pairwise_min(ha.hash_mins, hb.hash_mins) - 1.0;
}

/// Sum of Ha.val[i]*Hb.val[i] over repetitions whose minimum hashes collide.
inline double mh_collision_sum(const MinHashSketch& ha, const MinHashSketch& hb) {
    detail::require_compatible(ha, hb);
    double s = 0.0;
    for (std::size_t i = 0; i < ha.m; ++i)
        if (ha.hash_mins[i] == hb.hash_mins[i]) s += ha.sampled_vals[i] * hb.sampled_vals[i];
    return s;
}

/// Estimator with a caller-supplied union size (the true |A u B| gives the
/// idealized unbiased estimator).
inline double mh_estimate_with_union(const MinHashSketch& ha, const MinHashSketch& hb,
                                     double union_size) {
    return union_size / static_cast<double>(ha.m) * mh_collision_sum(ha, hb);
}

inline double mh_estimate(const MinHashSketch& ha, const MinHashSketch& hb) {
    return mh_estimate_with_union(ha, hb, union_estimate(ha, hb));
}

/// Median of per-pair estimates over an odd number of independently seeded pairs.
inline double mh_estimate_median(std::span<const std::pair<MinHashSketch, MinHashSketch>> pairs) {
    detail::require(!pairs.empty(), "median estimate needs at least one sketch pair");
    std::vector<double> est;
    est.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        detail::require(a.m == pairs.front().first.m && a.n == pairs.front().first.n,
                        "median sketch pairs differ in (m, n)");
        est.push_back(mh_estimate(a, b));
    }
    return detail::median_odd(std::move(est));
}

} // namespace ipsketch
