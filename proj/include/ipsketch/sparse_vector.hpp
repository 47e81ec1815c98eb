#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace ipsketch {

struct Entry {
    std::uint64_t index = 0; // 1-based
    double value = 0.0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse real vector over dimension n with 1-based indices. Entries are kept
/// sorted by index; zero values are never stored.
class SparseVector {
public:
    SparseVector() = default;

    /// Entries may come in any order. Duplicate indices, indices outside
    /// [1, n] and non-finite values are rejected; explicit zeros are dropped.
    SparseVector(std::uint64_t n, std::vector<Entry> entries) : n_(n) {
        detail::require(n >= 1, "vector dimension must be >= 1");
        std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.index < b.index; });
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = entries[i];
            if (e.index < 1 || e.index > n)
                detail::fail("index " + std::to_string(e.index) + " outside [1, " +
                             std::to_string(n) + "]");
            if (!std::isfinite(e.value)) detail::fail("non-finite vector entry");
            if (i > 0 && entries[i - 1].index == e.index)
                detail::fail("duplicate index " + std::to_string(e.index));
        }
        entries_ = std::move(entries);
    }

    /// Convenience for small literals: values[k] is the entry at index k + 1.
    static SparseVector from_dense(const std::vector<double>& values) {
        std::vector<Entry> e;
        for (std::size_t k = 0; k < values.size(); ++k)
            if (values[k] != 0.0) e.push_back({k + 1, values[k]});
        return SparseVector(values.empty() ? 1 : values.size(), std::move(e));
    }

    std::uint64_t dim() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    /// Value at a 1-based index (0 if absent).
    double at(std::uint64_t index) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                   [](const Entry& e, std::uint64_t i) { return e.index < i; });
        return (it != entries_.end() && it->index == index) ? it->value : 0.0;
    }

    SparseVector scaled(double factor) const {
        std::vector<Entry> e = entries_;
        for (auto& x : e) x.value *= factor;
        return SparseVector(n_, std::move(e));
    }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::uint64_t n_ = 1;
    std::vector<Entry> entries_;
};

namespace detail {
inline void require_same_dim(const SparseVector& a, const SparseVector& b) {
    if (a.dim() != b.dim())
        fail("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

/// Calls f(ea, eb) for every index present in both vectors.
template <class F>
void for_each_shared(const SparseVector& a, const SparseVector& b, F&& f) {
    auto ia = a.entries().begin(), ea = a.entries().end();
    auto ib = b.entries().begin(), eb = b.entries().end();
    while (ia != ea && ib != eb) {
        if (ia->index < ib->index) {
            ++ia;
        } else if (ib->index < ia->index) {
            ++ib;
        } else {
            f(*ia, *ib);
            ++ia;
            ++ib;
        }
    }
}
} // namespace detail

inline double inner(const SparseVector& a, const SparseVector& b) {
    detail::require_same_dim(a, b);
    double s = 0.0;
    detail::for_each_shared(a, b, [&](const Entry& x, const Entry& y) { s += x.value * y.value; });
    return s;
}

inline double squared_norm(const SparseVector& a) noexcept {
    double s = 0.0;
    for (const auto& e : a.entries()) s += e.value * e.value;
    return s;
}

inline double norm(const SparseVector& a) noexcept { return std::sqrt(squared_norm(a)); }

/// Both vectors restricted to the intersection of their supports.
inline std::pair<SparseVector, SparseVector> restrict_to_intersection(const SparseVector& a,
                                                                      const SparseVector& b) {
    detail::require_same_dim(a, b);
    std::vector<Entry> ra, rb;
    detail::for_each_shared(a, b, [&](const Entry& x, const Entry& y) {
        ra.push_back(x);
        rb.push_back(y);
    });
    return {SparseVector(a.dim(), std::move(ra)), SparseVector(b.dim(), std::move(rb))};
}

/// Number of indices in the intersection and in the union of the supports.
inline std::pair<std::size_t, std::size_t> support_overlap(const SparseVector& a,
                                                           const SparseVector& b) {
    detail::require_same_dim(a, b);
    std::size_t shared = 0;
    detail::for_each_shared(a, b, [&](const Entry&, const Entry&) { ++shared; });
    return {shared, a.nnz() + b.nnz() - shared};
}

// Text interchange: a header line "n=<dimension>" followed by one
// "index value" pair per line. Blank lines and lines starting with '#' are
// ignored.

inline SparseVector read_vector_text(std::istream& in) {
    std::string line;
    std::uint64_t n = 0;
    bool have_header = false;
    std::vector<Entry> entries;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!have_header) {
            if (line.compare(first, 2, "n=") != 0)
                detail::fail("vector file must start with a 'n=<dimension>' line");
            std::istringstream hs(line.substr(first + 2));
            long long parsed = 0;
            std::string trailing;
            if (!(hs >> parsed) || (hs >> trailing))
                detail::fail("malformed dimension header on line " + std::to_string(lineno));
            if (parsed < 1) detail::fail("vector dimension must be >= 1");
            n = static_cast<std::uint64_t>(parsed);
            have_header = true;
            continue;
        }
        std::istringstream ls(line);
        long long index = 0;
        double value = 0.0;
        if (!(ls >> index >> value) || index < 1)
            detail::fail("malformed entry on line " + std::to_string(lineno));
        std::string trailing;
        if (ls >> trailing) detail::fail("trailing text on line " + std::to_string(lineno));
        entries.push_back({static_cast<std::uint64_t>(index), value});
    }
    if (!have_header) detail::fail("missing 'n=<dimension>' header");
    return SparseVector(n, std::move(entries));
}

inline void write_vector_text(std::ostream& out, const SparseVector& v) {
    out << "n=" << v.dim() << '\n';
    const auto old = out.precision(17);
    for (const auto& e : v.entries()) out << e.index << ' ' << e.value << '\n';
    out.precision(old);
}

} // namespace ipsketch
