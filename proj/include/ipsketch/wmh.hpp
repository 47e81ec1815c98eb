#pragma once

// Weighted MinHash inner-product sketch.
//
// A vector a is normalized and rounded to a unit vector z whose squared
// entries are integer multiples of 1/L (round_unit). Conceptually each index i
// then becomes a block of L slots, the first k_i = L * z[i]^2 of which hold
// z[i]; MinHash over the nonzero slots samples index i with probability
// proportional to z[i]^2. The sketch keeps, per repetition, the minimum slot
// hash, the z entry it came from, and ||a||.
//
// The expanded vector is never materialized. `exact` hashes every nonzero slot
// with the linear family (O(m*L) work). `fast` replaces each block by its
// running-minimum record sequence (hashing.hpp), costing O(log k_i) per block.
// The two strategies agree in distribution only, so sketches built with
// different strategies cannot be compared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "hashing.hpp"
#include "sparse_vector.hpp"

namespace ipsketch {

inline constexpr std::uint64_t kDefaultL = 10'000'000;

struct RoundedEntry {
    std::uint64_t index = 0; // 1-based
    std::uint64_t count = 0; // k_i >= 1, z[i]^2 = k_i / L
    int sign = 1;            // +1 or -1

    friend bool operator==(const RoundedEntry&, const RoundedEntry&) = default;
};

/// Unit vector with squared entries on the 1/L grid, stored as exact counts.
struct RoundedUnitVector {
    std::uint64_t n = 0;
    std::uint64_t L = 0;
    std::vector<RoundedEntry> entries; // sorted by index; counts sum to L

    double value_of(const RoundedEntry& e) const {
        return e.sign * std::sqrt(static_cast<double>(e.count) / static_cast<double>(L));
    }

    std::uint64_t total_count() const noexcept {
        std::uint64_t s = 0;
        for (const auto& e : entries) s += e.count;
        return s;
    }

    /// scale * z as a sparse vector.
    SparseVector to_sparse(double scale = 1.0) const {
        std::vector<Entry> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back({e.index, scale * value_of(e)});
        return SparseVector(n, std::move(out));
    }

    friend bool operator==(const RoundedUnitVector&, const RoundedUnitVector&) = default;
};

namespace detail {
// floor() that forgives a few ulps of representation error, so squared
// entries already on the grid (up to rounding noise) keep their count.
inline std::uint64_t grid_floor(double x) {
    return static_cast<std::uint64_t>(std::floor(x * (1.0 + 1e-12)));
}
} // namespace detail

/// Rounds a unit vector onto the 1/L grid: every squared entry is floored to
/// a multiple of 1/L, then the largest-magnitude entry (lowest index on ties)
/// absorbs the missing mass. Entries whose count ends at zero are dropped.
inline RoundedUnitVector round_unit(const SparseVector& z, std::uint64_t L) {
    detail::require(L >= 1, "discretization parameter L must be >= 1");
    detail::require(!z.empty(), "cannot round an all-zero vector");
    detail::require(std::abs(norm(z) - 1.0) <= 1e-9, "round_unit expects a unit-norm vector");

    RoundedUnitVector r{z.dim(), L, {}};
    r.entries.reserve(z.nnz());
    std::size_t top = 0;
    std::uint64_t floor_sum = 0;
    const double Ld = static_cast<double>(L);
    for (std::size_t i = 0; i < z.nnz(); ++i) {
        const auto& e = z.entries()[i];
        const std::uint64_t k = detail::grid_floor(e.value * e.value * Ld);
        r.entries.push_back({e.index, k, e.value < 0 ? -1 : 1});
        floor_sum += k;
        if (std::abs(e.value) > std::abs(z.entries()[top].value)) top = i;
    }
    // floor_sum can only exceed L by grid_floor slack on huge L; the top entry
    // is the largest count, so it can always give the excess back.
    auto& t = r.entries[top];
    if (floor_sum <= L)
        t.count += L - floor_sum;
    else
        t.count -= floor_sum - L;
    std::erase_if(r.entries, [](const RoundedEntry& e) { return e.count == 0; });
    return r;
}

/// Number of nonzero slots in block `index` of the expanded vector.
inline std::uint64_t expanded_block_length(const RoundedUnitVector& r, std::uint64_t index) {
    auto it = std::lower_bound(r.entries.begin(), r.entries.end(), index,
                               [](const RoundedEntry& e, std::uint64_t i) { return e.index < i; });
    return (it != r.entries.end() && it->index == index) ? it->count : 0;
}

/// sum_j min(ka_j, kb_j) / sum_j max(ka_j, kb_j), in integer arithmetic.
inline double weighted_jaccard(const RoundedUnitVector& ra, const RoundedUnitVector& rb) {
    detail::require(ra.n == rb.n, "rounded vectors differ in dimension");
    detail::require(ra.L == rb.L, "rounded vectors differ in L");
    std::uint64_t mins = 0, maxs = 0;
    auto ia = ra.entries.begin(), ib = rb.entries.begin();
    while (ia != ra.entries.end() || ib != rb.entries.end()) {
        if (ib == rb.entries.end() || (ia != ra.entries.end() && ia->index < ib->index)) {
            maxs += ia++->count;
        } else if (ia == ra.entries.end() || ib->index < ia->index) {
            maxs += ib++->count;
        } else {
            mins += std::min(ia->count, ib->count);
            maxs += std::max(ia->count, ib->count);
            ++ia;
            ++ib;
        }
    }
    return maxs == 0 ? 0.0 : static_cast<double>(mins) / static_cast<double>(maxs);
}

/// Exact weighted union size sum_j max(z_a[j]^2, z_b[j]^2).
inline double weighted_union(const RoundedUnitVector& ra, const RoundedUnitVector& rb) {
    detail::require(ra.n == rb.n && ra.L == rb.L, "rounded vectors differ in (n, L)");
    std::uint64_t shared_min = 0;
    auto ia = ra.entries.begin(), ib = rb.entries.begin();
    while (ia != ra.entries.end() && ib != rb.entries.end()) {
        if (ia->index < ib->index) {
            ++ia;
        } else if (ib->index < ia->index) {
            ++ib;
        } else {
            shared_min += std::min(ia->count, ib->count);
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(2 * ra.L - shared_min) / static_cast<double>(ra.L);
}

struct WmhSketch {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t L = 0;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::fast;
    std::vector<double> hash_mins;    // in (0, 1]
    std::vector<double> sampled_vals; // entries of the rounded unit vector
    double stored_norm = 0.0;         // ||a||

    friend bool operator==(const WmhSketch&, const WmhSketch&) = default;
};

using WarnFn = std::function<void(const std::string&)>;

inline void warn_to_stderr(const std::string& msg) { std::cerr << "ipsketch: warning: " << msg << '\n'; }
inline void warn_quietly(const std::string&) {}

/// Rounding drops entries with z[i]^2 < 1/L, so L should exceed n by a
/// factor of 100 or more.
inline bool l_is_small(std::uint64_t n, std::uint64_t L) {
    return L / 100 < n;
}

namespace detail {

inline void wmh_exact_fill(WmhSketch& s, const RoundedUnitVector& r) {
    // Scrambled key of every nonzero slot, blocks laid out in index order.
    std::vector<std::uint32_t> keys;
    keys.reserve(r.L);
    std::vector<std::uint64_t> block_end;
    block_end.reserve(r.entries.size());
    for (const auto& e : r.entries) {
        const std::uint64_t base = (e.index - 1) * r.L;
        for (std::uint64_t slot = 1; slot <= e.count; ++slot)
            keys.push_back(static_cast<std::uint32_t>(scramble_index(base + slot)));
        block_end.push_back(keys.size());
    }
    for (std::uint64_t i = 0; i < s.m; ++i) {
        const HashFn h = make_hash({s.seed, i + 1});
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < keys.size(); ++j) {
            const std::uint64_t v = detail::mod_mersenne31(h.alpha * keys[j] + h.beta);
            if (v < best) {
                best = v;
                arg = j;
            }
        }
        const auto blk = static_cast<std::size_t>(
            std::upper_bound(block_end.begin(), block_end.end(), arg) - block_end.begin());
        s.hash_mins[i] = h.to_unit(best);
        s.sampled_vals[i] = r.value_of(r.entries[blk]);
    }
}

inline void wmh_fast_fill(WmhSketch& s, const RoundedUnitVector& r) {
    // Long prefixes first: they tend to set a low running minimum early, which
    // lets most other blocks be abandoned after a step or two.
    std::vector<std::size_t> order(r.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&r](std::size_t x, std::size_t y) { return r.entries[x].count > r.entries[y].count; });
    for (std::uint64_t i = 0; i < s.m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t b : order) {
            RecordWalker walk(detail::block_rng({s.seed, i + 1}, r.entries[b].index), s.L);
            if (!walk.run_to_unless_above(r.entries[b].count, best)) continue;
            const double v = walk.current().value;
            if (v < best || (v == best && b < arg)) {
                best = v;
                arg = b;
            }
        }
        s.hash_mins[i] = best;
        s.sampled_vals[i] = r.value_of(r.entries[arg]);
    }
}

} // namespace detail

inline WmhSketch wmh_sketch(const SparseVector& a, std::uint64_t m, std::uint64_t seed,
                            std::uint64_t L = kDefaultL, Strategy strategy = Strategy::fast,
                            const WarnFn& warn = warn_to_stderr) {
    detail::require(m >= 1, "sample count m must be >= 1");
    detail::require(L >= 1, "discretization parameter L must be >= 1");
    detail::require(!a.empty(), "cannot sketch an all-zero vector with weighted MinHash");
    detail::require(strategy == Strategy::exact || strategy == Strategy::fast,
                    "weighted MinHash strategy must be exact or fast");
    detail::require(a.dim() <= std::numeric_limits<std::uint64_t>::max() / L,
                    "n * L overflows the expanded index space");
    if (warn && l_is_small(a.dim(), L))
        warn("L = " + std::to_string(L) + " is below 100 * n = " + std::to_string(100 * a.dim()) +
             "; small entries will round to zero");

    const double a_norm = norm(a);
    const RoundedUnitVector r = round_unit(a.scaled(1.0 / a_norm), L);

    WmhSketch s{a.dim(), m, L, seed, strategy, std::vector<double>(m), std::vector<double>(m),
                a_norm};
    if (strategy == Strategy::exact)
        detail::wmh_exact_fill(s, r);
    else
        detail::wmh_fast_fill(s, r);
    return s;
}

namespace detail {
inline void require_compatible(const WmhSketch& a, const WmhSketch& b) {
    require(a.m == b.m, "weighted MinHash sketches differ in sample count");
    require(a.seed == b.seed, "weighted MinHash sketches were built with different seeds");
    require(a.L == b.L, "weighted MinHash sketches differ in L");
    require(a.n == b.n, "weighted MinHash sketches differ in dimension");
    require(a.strategy == b.strategy, "weighted MinHash sketches use different strategies");
    require(a.hash_mins.size() == a.m && b.hash_mins.size() == b.m &&
                a.sampled_vals.size() == a.m && b.sampled_vals.size() == b.m,
            "malformed weighted MinHash sketch");
}
} // namespace detail

/// (1/L) * (m / sum_i min(Wa.hash[i], Wb.hash[i]) - 1), an estimate of the
/// weighted union sum_j max(z_a[j]^2, z_b[j]^2).
inline double weighted_union_estimate(const WmhSketch& wa, const WmhSketch& wb) {
    detail::require_compatible(wa, wb);
    double s = 0.0;
    for (std::size_t i = 0; i < wa.m; ++i) s += std::min(wa.hash_mins[i], wb.hash_mins[i]);
    return (static_cast<double>(wa.m) / s - 1.0) / static_cast<double>(wa.L);
}

/// sum over colliding repetitions of va*vb / min(va^2, vb^2).
inline double wmh_collision_sum(const WmhSketch& wa, const WmhSketch& wb) {
    detail::require_compatible(wa, wb);
    double s = 0.0;
    for (std::size_t i = 0; i < wa.m; ++i) {
        if (wa.hash_mins[i] != wb.hash_mins[i]) continue;
        const double va = wa.sampled_vals[i], vb = wb.sampled_vals[i];
        s += va * vb / std::min(va * va, vb * vb);
    }
    return s;
}

/// Estimate of <z_a, z_b> (unit scale) using a caller-supplied weighted
/// union; the exact union gives the idealized unbiased estimator.
inline double wmh_unit_estimate_with_union(const WmhSketch& wa, const WmhSketch& wb,
                                           double weighted_union_size) {
    return weighted_union_size / static_cast<double>(wa.m) * wmh_collision_sum(wa, wb);
}

inline double wmh_estimate(const WmhSketch& wa, const WmhSketch& wb) {
    const double unit = wmh_unit_estimate_with_union(wa, wb, weighted_union_estimate(wa, wb));
    return wa.stored_norm * wb.stored_norm * unit;
}

inline double wmh_estimate_median(std::span<const std::pair<WmhSketch, WmhSketch>> pairs) {
    detail::require(!pairs.empty(), "median estimate needs at least one sketch pair");
    std::vector<double> est;
    est.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        detail::require(a.m == pairs.front().first.m && a.n == pairs.front().first.n &&
                            a.L == pairs.front().first.L,
                        "median sketch pairs differ in (m, n, L)");
        est.push_back(wmh_estimate(a, b));
    }
    return detail::median_odd(std::move(est));
}

} // namespace ipsketch
