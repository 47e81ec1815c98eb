#pragma once

// Table columns as sparse vectors, and join statistics from their sketches.
//
// A table with key column K and value column V over a key domain [1, n] gives
// two vectors: the key indicator (1 at every key) and the value vector (V at
// its key). For tables A and B:
//   join size       = <1_KA, 1_KB>
//   SUM of A values = <V_A, 1_KB>
//   MEAN            = SUM / join size

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sketch.hpp"
#include "sparse_vector.hpp"

namespace ipsketch {

class KeyedColumn {
public:
    KeyedColumn(std::uint64_t n, std::vector<std::uint64_t> keys,
                std::optional<std::vector<double>> values = std::nullopt)
        : n_(n), keys_(std::move(keys)), values_(std::move(values)) {
        detail::require(n_ >= 1, "key domain size n must be >= 1");
        if (values_)
            detail::require(values_->size() == keys_.size(), "value column length differs from key column");
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(keys_.size());
        for (auto k : keys_) {
            if (k < 1 || k > n_) detail::fail("key " + std::to_string(k) + " outside [1, " + std::to_string(n_) + "]");
            if (!seen.insert(k).second) detail::fail("duplicate key " + std::to_string(k));
        }
    }

    std::uint64_t dim() const noexcept { return n_; }
    const std::vector<std::uint64_t>& keys() const noexcept { return keys_; }
    const std::optional<std::vector<double>>& values() const noexcept { return values_; }
    bool has_values() const noexcept { return values_.has_value(); }

private:
    std::uint64_t n_;
    std::vector<std::uint64_t> keys_;
    std::optional<std::vector<double>> values_;
};

inline SparseVector encode_key_indicator(const KeyedColumn& col) {
    std::vector<Entry> es;
    es.reserve(col.keys().size());
    for (auto k : col.keys()) es.push_back({k, 1.0});
    return SparseVector(col.dim(), std::move(es));
}

/// Zero values are dropped, so those keys leave the vector's support.
inline SparseVector encode_value_column(const KeyedColumn& col) {
    detail::require(col.has_values(), "column has no values to encode");
    const auto& vals = *col.values();
    std::vector<Entry> es;
    es.reserve(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) es.push_back({col.keys()[i], vals[i]});
    return SparseVector(col.dim(), std::move(es));
}

struct JoinStats {
    double join_size = 0.0;
    double sum_a = 0.0;
    std::optional<double> mean_a; // empty when join_size <= 0

    static JoinStats from(double join_size, double sum_a) {
        JoinStats s{join_size, sum_a, std::nullopt};
        if (join_size > 0.0) s.mean_a = sum_a / join_size;
        return s;
    }
};

/// Join statistics from any pairwise inner-product estimator, e.g. exact
/// `inner` or a sketch estimator.
template <class T, class Estimator>
JoinStats estimate_join_stats(const T& value_a, const T& key_a, const T& key_b, Estimator&& est) {
    const double join = est(key_a, key_b);
    const double sum = est(value_a, key_b);
    return JoinStats::from(join, sum);
}

/// Sketch form: all three sketches must share method and parameters.
inline JoinStats estimate_join_stats(const AnySketch& value_a, const AnySketch& key_a, const AnySketch& key_b) {
    const SketchParams pv = params_of(value_a), pa = params_of(key_a), pb = params_of(key_b);
    detail::require(pv == pa && pa == pb, "join sketches were built with different parameters");
    return estimate_join_stats(value_a, key_a, key_b,
                               [](const AnySketch& x, const AnySketch& y) { return estimate(x, y); });
}

inline JoinStats exact_join_stats(const KeyedColumn& a, const KeyedColumn& b) {
    return estimate_join_stats(encode_value_column(a), encode_key_indicator(a), encode_key_indicator(b),
                               [](const SparseVector& x, const SparseVector& y) { return inner(x, y); });
}

/// |K_A ∩ K_B| / |K_A ∪ K_B|.
inline double key_jaccard(const KeyedColumn& a, const KeyedColumn& b) {
    const auto [shared, uni] = support_overlap(encode_key_indicator(a), encode_key_indicator(b));
    if (uni == 0) return 0.0;
    return static_cast<double>(shared) / static_cast<double>(uni);
}

// String keys -----------------------------------------------------------------

inline constexpr std::uint64_t kHashedKeyDomain = 1ULL << 32;

/// FNV-1a folded into [1, 2^32]. Distinct strings may collide.
inline std::uint64_t hash_key(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return (h % kHashedKeyDomain) + 1;
}

// CSV -------------------------------------------------------------------------

struct CsvOptions {
    bool header = false;
    bool hash_keys = false;
    std::uint64_t n = 0; // 0: 2^32 with hashed keys, otherwise the largest key
};

namespace detail {
inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::uint64_t parse_key(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    unsigned long long k = 0;
    try {
        if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
        k = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        fail("line " + std::to_string(line) + ": key '" + s + "' is not a positive integer (use --hash-keys)");
    return k;
}

inline double parse_value(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) fail("line " + std::to_string(line) + ": value '" + s + "' is not a number");
    return v;
}
} // namespace detail

/// Reads `key` or `key,value` rows. Blank lines are skipped. The value column
/// is present only if every row has one.
inline KeyedColumn read_column_csv(std::istream& in, const CsvOptions& opt = {}) {
    std::vector<std::uint64_t> keys;
    std::vector<double> vals;
    std::string line;
    std::size_t lineno = 0;
    int width = -1;
    bool skipped_header = !opt.header;
    std::uint64_t max_key = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(detail::trim(cell));
        const int w = static_cast<int>(cells.size());
        if (w < 1 || w > 2) detail::fail("line " + std::to_string(lineno) + ": expected 1 or 2 columns");
        if (width == -1) width = w;
        if (w != width) detail::fail("line " + std::to_string(lineno) + ": inconsistent column count");
        const std::uint64_t k = opt.hash_keys ? hash_key(cells[0]) : detail::parse_key(cells[0], lineno);
        keys.push_back(k);
        max_key = std::max(max_key, k);
        if (w == 2) vals.push_back(detail::parse_value(cells[1], lineno));
    }
    std::uint64_t n = opt.n;
    if (n == 0) n = opt.hash_keys ? kHashedKeyDomain : std::max<std::uint64_t>(max_key, 1);
    if (width == 2) return KeyedColumn(n, std::move(keys), std::move(vals));
    return KeyedColumn(n, std::move(keys));
}

} // namespace ipsketch
