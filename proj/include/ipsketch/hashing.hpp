#pragma once

// Seedable hash primitives shared by every sampling sketch.
//
// Two families live here:
//  * HashFn: the 2-wise independent linear family h(x) = ((a*x + b) mod p + 1) / p
//    over the Mersenne prime p = 2^31 - 1. Sketches feed it a scrambled key
//    (see scramble_index) rather than the raw index.
//  * Record sequences: a deterministic realization of the running minimum of
//    i.i.d. uniforms over a block, generated by geometric skipping. Used by the
//    "fast" weighted MinHash strategy.
//
// All randomness is drawn from CounterRng, a counter-based generator built on
// the SplitMix64 finalizer and keyed by (master seed, stream, a, b). Outputs
// depend only on the key and counter, so sketches built in different processes
// agree bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "error.hpp"

namespace ipsketch {

/// Modulus of the linear hash family. Recorded in every serialized sketch.
inline constexpr std::uint64_t kPrime = 2147483647ULL; // 2^31 - 1

/// Identifier of the counter-based generator, also written to serialized sketches.
inline constexpr char kPrngId[9] = "SPLMX64C";

/// Independent random streams carved out of one master seed.
enum class Stream : std::uint64_t {
    hash_params = 1,
    block_records = 2,
    jl_signs = 3,
    cs_bucket = 4,
    cs_sign = 5,
    synthetic = 6,
    median = 7,
};

namespace detail {

__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) noexcept {
    return mix64(h ^ (v + kGolden + (h << 6) + (h >> 2)));
}

/// x mod (2^31 - 1) for any x < 2^63.
constexpr std::uint64_t mod_mersenne31(std::uint64_t x) noexcept {
    x = (x & kPrime) + (x >> 31);
    x = (x & kPrime) + (x >> 31);
    return x >= kPrime ? x - kPrime : x;
}

/// Bijection on [0, 2^31).
constexpr std::uint64_t permute31(std::uint64_t x) noexcept {
    constexpr std::uint64_t mask = (1ULL << 31) - 1;
    x &= mask;
    x ^= x >> 15;
    x = (x * 0x2C1B3C6DULL) & mask;
    x ^= x >> 12;
    x = (x * 0x297A2D39ULL) & mask;
    x ^= x >> 15;
    return x;
}

} // namespace detail

/// Counter-based generator: value(counter) is a pure function of (key, counter).
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                         std::uint64_t b = 0) noexcept
        : key_(detail::combine(
              detail::combine(detail::combine(detail::mix64(seed ^ 0xA0761D6478BD642FULL),
                                              static_cast<std::uint64_t>(stream)),
                              a),
              b)) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return detail::mix64(key_ + (counter + 1) * detail::kGolden);
    }

    /// Uniform on (0, 1].
    double unit_closed(std::uint64_t counter) const noexcept {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on (0, 1).
    double unit_open(std::uint64_t counter) const noexcept {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) (bound >= 1), via 128-bit multiply-high.
    std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<detail::u128>(bits(counter)) * bound) >> 64);
    }

private:
    std::uint64_t key_;
};

/// Seed for a new independent sketch family derived from `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t k) noexcept {
    return CounterRng(master, stream, k).bits(0);
}

/// Seed of the k-th (0-based) independent sketch pair used for median boosting.
constexpr std::uint64_t median_seed(std::uint64_t master, std::uint64_t k) noexcept {
    return derive_seed(master, Stream::median, k);
}

struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t repetition = 1; // 1-based
};

/// Member of the linear family x -> ((alpha*x + beta) mod p + 1) / p.
struct HashFn {
    std::uint64_t alpha = 1;
    std::uint64_t beta = 0;
    std::uint64_t prime = kPrime;

    /// Explicit parameters; intended for tests on small primes.
    static HashFn with_params(std::uint64_t alpha, std::uint64_t beta, std::uint64_t prime) {
        detail::require(prime >= 2, "hash prime must be >= 2");
        detail::require(alpha >= 1 && alpha < prime, "hash multiplier must lie in [1, p-1]");
        detail::require(beta < prime, "hash offset must lie in [0, p-1]");
        return HashFn{alpha, beta, prime};
    }

    /// (alpha*x + beta) mod p, any 64-bit x.
    std::uint64_t raw(std::uint64_t x) const noexcept {
        const auto v = static_cast<detail::u128>(alpha) * x + beta;
        return static_cast<std::uint64_t>(v % prime);
    }

    /// raw() specialized to p = 2^31 - 1 and keys already reduced below p.
    std::uint64_t raw_key(std::uint64_t key) const noexcept {
        return detail::mod_mersenne31(alpha * key + beta);
    }

    double evaluate(std::uint64_t index) const noexcept {
        return static_cast<double>(raw(index) + 1) / static_cast<double>(prime);
    }

    /// Hash value in (0, 1] corresponding to a raw residue.
    double to_unit(std::uint64_t residue) const noexcept {
        return static_cast<double>(residue + 1) / static_cast<double>(prime);
    }

    friend bool operator==(const HashFn&, const HashFn&) = default;
};

/// The i-th hash function of master seed s. alpha and beta come from
/// CounterRng(s, hash_params, i) counters 0 and 1.
inline HashFn make_hash(const SeedSpec& seed) {
    detail::require(seed.repetition >= 1, "repetition index must be >= 1");
    const CounterRng rng(seed.master, Stream::hash_params, seed.repetition);
    return HashFn{1 + rng.below(0, kPrime - 1), rng.below(1, kPrime), kPrime};
}

inline double evaluate(const HashFn& h, std::uint64_t index) {
    detail::require(index >= 1, "hash index must be >= 1");
    return h.evaluate(index);
}

/// Fixed pseudo-random relabeling of a 1-based index into [0, p). Indices
/// below p map bijectively (a 31-bit permutation with cycle walking); larger
/// indices are mixed and reduced, which can alias with probability ~1/p per pair.
///
/// The linear family is only pairwise independent: on runs of consecutive
/// indices its argmin is far from uniform. Relabeling first restores
/// near-uniform argmins, which every MinHash guarantee depends on.
constexpr std::uint64_t scramble_index(std::uint64_t index) noexcept {
    if (index < kPrime) {
        std::uint64_t y = detail::permute31(index);
        while (y >= kPrime) y = detail::permute31(y);
        return y;
    }
    return detail::mix64(index) % kPrime;
}

struct Record {
    std::uint64_t position = 0; // 1-based within the block
    double value = 1.0;         // in (0, 1]

    friend bool operator==(const Record&, const Record&) = default;
};

/// Running-minimum records of one block, generated from the end of the
/// block toward position 1. The first step draws the minimum over all
/// block_len positions and its position q, uniform on [1, block_len]. Each
/// later step draws the minimum over positions 1..q-1: given the current
/// minimum v those positions are iid uniform on (v, 1), so the new minimum is
/// v + (1 - v) * Beta(1, q - 1) at a uniform position. The walk visits the
/// records of the forward running minimum in reverse order, and values only
/// grow along it, so a block whose value already exceeds a bound can be
/// abandoned early.
class RecordWalker {
public:
    RecordWalker(const CounterRng& rng, std::uint64_t block_len) noexcept : rng_(rng) { step(block_len, 0.0); }

    const Record& current() const noexcept { return current_; }

    /// Step to the minimum over the positions before the current record;
    /// false once the current record is at position 1.
    bool advance() noexcept {
        if (current_.position == 1) return false;
        step(current_.position - 1, current_.value);
        return true;
    }

    /// The record holding the minimum of positions 1..prefix_len (>= 1).
    const Record& run_to(std::uint64_t prefix_len) noexcept {
        while (current_.position > prefix_len) advance();
        return current_;
    }

    /// Like run_to, but gives up and returns false as soon as the value
    /// exceeds `bound` (the prefix minimum would too).
    bool run_to_unless_above(std::uint64_t prefix_len, double bound) noexcept {
        for (;;) {
            if (current_.value > bound) return false;
            if (current_.position <= prefix_len) return true;
            advance();
        }
    }

private:
    // Minimum of n uniforms on (floor, 1) and its position in [1, n].
    void step(std::uint64_t n, double floor) noexcept {
        const double beta = -std::expm1(std::log(rng_.unit_open(counter_)) / static_cast<double>(n));
        double v = floor + (1.0 - floor) * beta;
        if (!(v > floor)) v = std::nextafter(floor, 1.0);
        current_ = {1 + rng_.below(counter_ + 1, n), v};
        counter_ += 2;
    }

    CounterRng rng_;
    Record current_;
    std::uint64_t counter_ = 0;
};

namespace detail {
inline void check_prefix(std::uint64_t prefix_len, std::uint64_t block_len) {
    require(block_len >= 1, "block length must be >= 1");
    require(prefix_len <= block_len, "prefix length exceeds block length");
}

inline CounterRng block_rng(const SeedSpec& seed, std::uint64_t block_id) noexcept {
    return CounterRng(seed.master, Stream::block_records, seed.repetition, block_id);
}
} // namespace detail

/// Records of the running minimum of block `block_id` over positions
/// 1..prefix_len, in increasing position. Positions strictly increase and
/// values strictly decrease; for T1 <= T2 the sequence at T1 is a prefix of
/// the sequence at T2.
inline std::vector<Record> record_sequence(const SeedSpec& seed, std::uint64_t block_id,
                                           std::uint64_t prefix_len, std::uint64_t block_len) {
    detail::check_prefix(prefix_len, block_len);
    std::vector<Record> out;
    if (prefix_len == 0) return out;
    RecordWalker walk(detail::block_rng(seed, block_id), block_len);
    walk.run_to(prefix_len);
    do {
        out.push_back(walk.current());
    } while (walk.advance());
    std::reverse(out.begin(), out.end());
    return out;
}

/// Minimum hash value (and its position) over positions 1..prefix_len of a
/// block; empty for an empty prefix.
inline std::optional<Record> block_prefix_min(const SeedSpec& seed, std::uint64_t block_id,
                                              std::uint64_t prefix_len, std::uint64_t block_len) {
    detail::check_prefix(prefix_len, block_len);
    if (prefix_len == 0) return std::nullopt;
    RecordWalker walk(detail::block_rng(seed, block_id), block_len);
    return walk.run_to(prefix_len);
}

} // namespace ipsketch
