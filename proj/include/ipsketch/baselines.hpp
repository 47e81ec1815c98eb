#pragma once

// Competitor sketches: dense sign projection (JL / AMS), CountSketch with a
// median over repetitions, and k-minimum-values sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "common.hpp"
#include "hashing.hpp"
#include "sparse_vector.hpp"

namespace ipsketch {

// ---------------------------------------------------------------------------
// JL / AMS
// ---------------------------------------------------------------------------

struct JlSketch {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
    std::vector<double> projected; // Pi * a

    friend bool operator==(const JlSketch&, const JlSketch&) = default;
};

/// Pi[i][j] = +-1/sqrt(m). The signs of column j come 64 at a time from
/// CounterRng(seed, jl_signs, j), so Pi is never materialized and only the
/// columns of nonzero entries are generated.
inline JlSketch jl_sketch(const SparseVector& a, std::uint64_t m, std::uint64_t seed) {
    detail::require(m >= 1, "JL row count m must be >= 1");
    JlSketch s{a.dim(), m, seed, std::vector<double>(m, 0.0)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (const auto& e : a.entries()) {
        const CounterRng rng(seed, Stream::jl_signs, e.index);
        const double v = scale * e.value;
        for (std::uint64_t w = 0; w * 64 < m; ++w) {
            std::uint64_t bits = rng.bits(w);
            const std::uint64_t end = std::min<std::uint64_t>(m, (w + 1) * 64);
            for (std::uint64_t i = w * 64; i < end; ++i, bits >>= 1)
                s.projected[i] += (bits & 1) ? -v : v;
        }
    }
    return s;
}

inline double jl_estimate(const JlSketch& sa, const JlSketch& sb) {
    detail::require(sa.m == sb.m && sa.projected.size() == sa.m && sb.projected.size() == sb.m,
                    "JL sketches differ in row count");
    detail::require(sa.seed == sb.seed, "JL sketches were built with different seeds");
    detail::require(sa.n == sb.n, "JL sketches differ in dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < sa.m; ++i) s += sa.projected[i] * sb.projected[i];
    return s;
}

// ---------------------------------------------------------------------------
// CountSketch
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultCsRepetitions = 5;

struct CountSketch {
    std::uint64_t n = 0;
    std::uint64_t m = 0; // buckets per repetition
    std::uint64_t r = 0; // repetitions
    std::uint64_t seed = 0;
    std::vector<double> table; // r x m, row-major

    std::span<const double> row(std::uint64_t t) const {
        return std::span<const double>(table).subspan(t * m, m);
    }

    friend bool operator==(const CountSketch&, const CountSketch&) = default;
};

namespace detail {
struct CsHashes {
    HashFn bucket;
    HashFn sign;
};

inline CsHashes cs_hashes(std::uint64_t seed, std::uint64_t t) {
    return {make_hash({derive_seed(seed, Stream::cs_bucket, 0), t + 1}),
            make_hash({derive_seed(seed, Stream::cs_sign, 0), t + 1})};
}
} // namespace detail

inline CountSketch cs_sketch(const SparseVector& a, std::uint64_t m,
                             std::uint64_t r = kDefaultCsRepetitions, std::uint64_t seed = 0) {
    detail::require(m >= 1, "CountSketch bucket count must be >= 1");
    detail::require(r >= 1, "CountSketch repetition count must be >= 1");
    CountSketch s{a.dim(), m, r, seed, std::vector<double>(m * r, 0.0)};
    for (std::uint64_t t = 0; t < r; ++t) {
        const auto h = detail::cs_hashes(seed, t);
        double* row = s.table.data() + t * m;
        for (const auto& e : a.entries()) {
            const std::uint64_t bucket = h.bucket.raw(e.index) % m;
            row[bucket] += (h.sign.raw(e.index) & 1) ? -e.value : e.value;
        }
    }
    return s;
}

/// <row_t(a), row_t(b)> for every repetition t.
inline std::vector<double> cs_row_estimates(const CountSketch& sa, const CountSketch& sb) {
    detail::require(sa.m == sb.m && sa.r == sb.r, "CountSketch shapes differ");
    detail::require(sa.table.size() == sa.m * sa.r && sb.table.size() == sb.m * sb.r,
                    "malformed CountSketch table");
    detail::require(sa.seed == sb.seed, "CountSketches were built with different seeds");
    detail::require(sa.n == sb.n, "CountSketches differ in dimension");
    std::vector<double> out(sa.r);
    for (std::uint64_t t = 0; t < sa.r; ++t) {
        const auto x = sa.row(t), y = sb.row(t);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        out[t] = s;
    }
    return out;
}

inline double cs_estimate(const CountSketch& sa, const CountSketch& sb) {
    return detail::median(cs_row_estimates(sa, sb));
}

// ---------------------------------------------------------------------------
// KMV
// ---------------------------------------------------------------------------

struct KmvEntry {
    double hash = 0.0;
    std::uint64_t index = 0;
    double value = 0.0;

    friend bool operator==(const KmvEntry&, const KmvEntry&) = default;
};

struct KmvSketch {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t seed = 0;
    std::vector<KmvEntry> entries; // at most k, strictly increasing hash
    bool truncated = false;        // supp(a) had more than k distinct hashes

    friend bool operator==(const KmvSketch&, const KmvSketch&) = default;
};

/// Keeps the k smallest hashes over supp(a): a sample without replacement.
inline KmvSketch kmv_sketch(const SparseVector& a, std::uint64_t k, std::uint64_t seed) {
    detail::require(k >= 2, "KMV budget k must be >= 2");
    const HashFn h = make_hash({seed, 1});
    std::vector<KmvEntry> all;
    all.reserve(a.nnz());
    for (const auto& e : a.entries())
        all.push_back({h.to_unit(h.raw_key(scramble_index(e.index))), e.index, e.value});
    auto by_hash = [](const KmvEntry& x, const KmvEntry& y) {
        return x.hash < y.hash || (x.hash == y.hash && x.index < y.index);
    };
    std::sort(all.begin(), all.end(), by_hash);
    // Aliased indices (possible only beyond p) share a hash; keep the first.
    all.erase(std::unique(all.begin(), all.end(),
                          [](const KmvEntry& x, const KmvEntry& y) { return x.hash == y.hash; }),
              all.end());
    const bool truncated = all.size() > k;
    if (truncated) all.resize(k);
    return KmvSketch{a.dim(), k, seed, std::move(all), truncated};
}

/// Let K be the k smallest hashes of the union of both samples and tau the
/// largest of them. Returns ((k-1)/tau) / k * sum of a[j]*b[j] over j in K
/// sampled by both sketches. When neither sketch was truncated the samples
/// hold the full supports and the exact sum is returned.
inline double kmv_estimate(const KmvSketch& sa, const KmvSketch& sb) {
    detail::require(sa.k == sb.k, "KMV sketches differ in budget k");
    detail::require(sa.seed == sb.seed, "KMV sketches were built with different seeds");
    detail::require(sa.n == sb.n, "KMV sketches differ in dimension");
    const auto& x = sa.entries;
    const auto& y = sb.entries;
    std::size_t i = 0, j = 0, taken = 0;
    double tau = 1.0, sum = 0.0;
    if (!sa.truncated && !sb.truncated) {
        while (i < x.size() && j < y.size()) {
            if (x[i].hash < y[j].hash) {
                ++i;
            } else if (y[j].hash < x[i].hash) {
                ++j;
            } else {
                if (x[i].index == y[j].index) sum += x[i].value * y[j].value;
                ++i;
                ++j;
            }
        }
        return sum;
    }
    while (taken < sa.k && (i < x.size() || j < y.size())) {
        if (j == y.size() || (i < x.size() && x[i].hash < y[j].hash)) {
            tau = x[i++].hash;
        } else if (i == x.size() || y[j].hash < x[i].hash) {
            tau = y[j++].hash;
        } else {
            tau = x[i].hash;
            if (x[i].index == y[j].index) sum += x[i].value * y[j].value;
            ++i;
            ++j;
        }
        ++taken;
    }
    const double union_est = static_cast<double>(sa.k - 1) / tau;
    return union_est / static_cast<double>(sa.k) * sum;
}

} // namespace ipsketch
