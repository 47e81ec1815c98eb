#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <ipsketch/sparse_vector.hpp>
#include <ipsketch/tables.hpp>

namespace fixtures {

// Two small keyed tables over the key domain [1, 16].
inline ipsketch::KeyedColumn table_a() {
    return {16, {1, 3, 4, 5, 6, 7, 8, 9, 11}, std::vector<double>{6, 2, 6, 1, 4, 2, 2, 8, 3}};
}

inline ipsketch::KeyedColumn table_b() {
    return {16, {2, 4, 5, 8, 10, 11, 12, 15, 16}, std::vector<double>{1, 5, 1, 2, 4, 2.5, 6, 6, 3.7}};
}

/// Random vector on n indices; each index kept with probability `density`
/// (at least one is kept), values uniform on [-1, 1] with occasional spikes.
inline ipsketch::SparseVector random_vector(std::mt19937_64& rng, std::uint64_t n, double density) {
    std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
    std::vector<ipsketch::Entry> es;
    for (std::uint64_t i = 1; i <= n; ++i) {
        if (u(rng) < density) {
            double x = v(rng);
            if (u(rng) < 0.1) x *= 10.0;
            if (x == 0.0) x = 0.5;
            es.push_back({i, x});
        }
    }
    if (es.empty()) es.push_back({1 + rng() % n, 1.0});
    return ipsketch::SparseVector(n, std::move(es));
}

/// Binary vector with the given support.
inline ipsketch::SparseVector indicator(std::uint64_t n, const std::vector<std::uint64_t>& support) {
    std::vector<ipsketch::Entry> es;
    for (auto i : support) es.push_back({i, 1.0});
    return ipsketch::SparseVector(n, std::move(es));
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double std_error(const std::vector<double>& xs) {
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

} // namespace fixtures
