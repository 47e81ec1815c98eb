#pragma once

// Synthetic benchmark: generates sparse pairs with controlled support overlap,
// sketches them at matched storage, and reports scaled errors as CSV rows.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "sketch.hpp"
#include "sparse_vector.hpp"

namespace ipsketch {

inline constexpr const char* kBaseDistribution = "normal-rejected[-1,1]";

struct SyntheticConfig {
    std::uint64_t n = 10000;
    std::uint64_t nnz = 2000;
    double gamma = 0.0; // overlap fraction
    double outlier_frac = 0.10;
    double outlier_lo = 20.0;
    double outlier_hi = 30.0;
    std::string distribution = kBaseDistribution;
    std::uint64_t seed = 0;
    std::uint64_t trials = 10;
};

inline void validate(const SyntheticConfig& c) {
    detail::require(c.n >= 1, "n must be >= 1");
    detail::require(c.nnz >= 1, "nnz must be >= 1");
    detail::require(c.gamma >= 0.0 && c.gamma <= 1.0, "overlap fraction must lie in [0, 1]");
    detail::require(c.outlier_frac >= 0.0 && c.outlier_frac <= 1.0, "outlier fraction must lie in [0, 1]");
    detail::require(c.outlier_lo <= c.outlier_hi, "outlier range is empty");
    detail::require(c.distribution == kBaseDistribution,
                    "unsupported base distribution (only normal-rejected[-1,1])");
    detail::require(c.trials >= 1, "trials must be >= 1");
}

inline std::uint64_t shared_count(const SyntheticConfig& c) {
    return static_cast<std::uint64_t>(std::floor(c.gamma * static_cast<double>(c.nnz)));
}

namespace detail {
/// Sequential reader over one CounterRng stream.
class Draws {
public:
    Draws(std::uint64_t seed, std::uint64_t sub) : rng_(seed, Stream::synthetic, sub) {}
    double open() { return rng_.unit_open(c_++); }
    std::uint64_t below(std::uint64_t bound) { return rng_.below(c_++, bound); }

    /// Standard normal conditioned on [-1, 1], by rejection.
    double normal_in_unit() {
        for (;;) {
            const double r = std::sqrt(-2.0 * std::log(open()));
            const double t = 2.0 * 3.14159265358979323846 * open();
            const double x = r * std::cos(t);
            if (x >= -1.0 && x <= 1.0) return x;
            const double y = r * std::sin(t);
            if (y >= -1.0 && y <= 1.0) return y;
        }
    }

private:
    CounterRng rng_;
    std::uint64_t c_ = 0;
};

inline std::vector<Entry> synthetic_values(const SyntheticConfig& c, std::uint64_t seed, std::uint64_t sub,
                                           const std::vector<std::uint64_t>& support) {
    Draws base(seed, sub), outlier(seed, sub + 1);
    std::vector<Entry> es;
    es.reserve(support.size());
    for (auto idx : support) {
        double v = base.normal_in_unit();
        if (outlier.open() < c.outlier_frac) v = c.outlier_lo + (c.outlier_hi - c.outlier_lo) * outlier.open();
        es.push_back({idx, v});
    }
    return es;
}
} // namespace detail

/// Pair with exactly floor(gamma*nnz) shared support indices; the rest of
/// each support is disjoint. Deterministic in `pair_seed`.
inline std::pair<SparseVector, SparseVector> gen_synthetic(const SyntheticConfig& c, std::uint64_t pair_seed) {
    validate(c);
    const std::uint64_t shared = shared_count(c);
    const std::uint64_t own = c.nnz - shared;
    detail::require(own <= (c.n - std::min(c.n, shared)) / 2,
                    "overlap and nnz need more distinct indices than n provides");
    const std::uint64_t need = shared + 2 * own;

    // Partial Fisher-Yates over 1..n.
    std::vector<std::uint64_t> perm(c.n);
    std::iota(perm.begin(), perm.end(), std::uint64_t{1});
    detail::Draws pick(pair_seed, 0);
    for (std::uint64_t i = 0; i < need; ++i) std::swap(perm[i], perm[i + pick.below(c.n - i)]);

    std::vector<std::uint64_t> sa(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(shared + own));
    std::vector<std::uint64_t> sb(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(shared));
    sb.insert(sb.end(), perm.begin() + static_cast<std::ptrdiff_t>(shared + own),
              perm.begin() + static_cast<std::ptrdiff_t>(need));
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return {SparseVector(c.n, detail::synthetic_values(c, pair_seed, 1, sa)),
            SparseVector(c.n, detail::synthetic_values(c, pair_seed, 3, sb))};
}

inline std::uint64_t trial_pair_seed(std::uint64_t master, std::uint64_t trial) {
    return derive_seed(master, Stream::synthetic, 2 * trial);
}

inline std::uint64_t trial_sketch_seed(std::uint64_t master, std::uint64_t trial) {
    return derive_seed(master, Stream::synthetic, 2 * trial + 1);
}

/// Largest sample count whose storage does not exceed `budget`; 0 if none.
inline std::uint64_t samples_for_budget(Method method, double budget, std::uint64_t cs_reps = kDefaultCsRepetitions) {
    if (!(budget > 0.0)) return 0;
    double m = 0.0;
    switch (method) {
    case Method::mh:
    case Method::kmv: m = budget / 1.5; break;
    case Method::wmh: m = (budget - 1.0) / 1.5; break;
    case Method::jl: m = budget; break;
    case Method::cs: m = budget / static_cast<double>(cs_reps); break;
    }
    return m < 1.0 ? 0 : static_cast<std::uint64_t>(std::floor(m + 1e-9));
}

struct EstimateReport {
    Method method = Method::wmh;
    double budget = 0.0;
    std::uint64_t m = 0;
    double storage = 0.0;
    std::uint64_t trial = 0;
    double truth = 0.0;
    double estimate = 0.0;
    double scaled_error = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
};

struct BenchOptions {
    std::uint64_t L = kDefaultL;
    Strategy strategy = Strategy::fast;
    std::uint64_t cs_reps = kDefaultCsRepetitions;
    unsigned threads = 0; // 0: IPSKETCH_THREADS, else hardware concurrency
    WarnFn warn = warn_to_stderr;
};

inline unsigned default_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("IPSKETCH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

namespace detail {
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
    };
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}
} // namespace detail

/// One row per (method, budget, trial). Every method sees the same pair and
/// sketch seed within a trial. Rows come back sorted by (method, budget,
/// trial) whatever the thread count.
inline std::vector<EstimateReport> run_experiment(const SyntheticConfig& cfg, const std::vector<Method>& methods,
                                                  const std::vector<double>& budgets,
                                                  const BenchOptions& opt = {}) {
    validate(cfg);
    struct Cell {
        Method method;
        double budget;
        std::uint64_t m;
        std::uint64_t trial;
    };
    std::vector<Cell> cells;
    for (Method meth : methods) {
        for (double b : budgets) {
            std::uint64_t m = samples_for_budget(meth, b, opt.cs_reps);
            if (meth == Method::kmv && m < 2) m = 0;
            if (m == 0) {
                if (opt.warn)
                    opt.warn("skipping " + std::string(method_name(meth)) + " at budget " + std::to_string(b) +
                             ": no valid sample count fits");
                continue;
            }
            for (std::uint64_t t = 0; t < cfg.trials; ++t) cells.push_back({meth, b, m, t});
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
        return std::tie(x.method, x.budget, x.trial) < std::tie(y.method, y.budget, y.trial);
    });

    std::vector<std::pair<SparseVector, SparseVector>> pairs;
    std::vector<double> truth(cfg.trials), scale(cfg.trials);
    pairs.reserve(cfg.trials);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        pairs.push_back(gen_synthetic(cfg, trial_pair_seed(cfg.seed, t)));
        truth[t] = inner(pairs[t].first, pairs[t].second);
        scale[t] = norm(pairs[t].first) * norm(pairs[t].second);
    }

    std::vector<EstimateReport> rows(cells.size());
    const WarnFn quiet = warn_quietly;
    detail::parallel_for(cells.size(), opt.threads ? opt.threads : default_threads(), [&](std::size_t i) {
        const Cell& c = cells[i];
        const auto& [a, b] = pairs[c.trial];
        SketchParams p{c.method, a.dim(), c.m, 0, 0, trial_sketch_seed(cfg.seed, c.trial), Strategy::none};
        if (c.method == Method::wmh) {
            p.L = opt.L;
            p.strategy = opt.strategy;
        }
        if (c.method == Method::cs) p.r = opt.cs_reps;
        const AnySketch sa = make_sketch(a, p, quiet);
        const AnySketch sb = make_sketch(b, p, quiet);
        const double est = estimate(sa, sb);
        const double t = truth[c.trial];
        rows[i] = EstimateReport{c.method, c.budget,           c.m,       storage_size(sa), c.trial, t, est,
                                 scale[c.trial] > 0 ? std::abs(est - t) / scale[c.trial] : 0.0,
                                 cfg.gamma,      cfg.seed};
    });
    if (opt.warn && std::find(methods.begin(), methods.end(), Method::wmh) != methods.end() &&
        l_is_small(cfg.n, opt.L))
        opt.warn("L = " + std::to_string(opt.L) + " is below 100 * n; small entries round to zero");
    return rows;
}

inline constexpr const char* kCsvHeader = "method,budget,m,trial,truth,estimate,scaled_error,gamma,seed";

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv_row(std::ostream& out, const EstimateReport& r) {
    out << method_name(r.method) << ',' << format_number(r.budget) << ',' << r.m << ',' << r.trial << ','
        << format_number(r.truth) << ',' << format_number(r.estimate) << ',' << format_number(r.scaled_error)
        << ',' << format_number(r.gamma) << ',' << r.seed << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<EstimateReport>& rows, bool header = true) {
    if (header) out << kCsvHeader << '\n';
    for (const auto& r : rows) write_csv_row(out, r);
}

struct ErrorSummary {
    Method method;
    double budget;
    double gamma;
    double mean_scaled_error;
    std::size_t count;
};

/// Mean scaled error per (gamma, method, budget).
inline std::vector<ErrorSummary> summarize(const std::vector<EstimateReport>& rows) {
    std::map<std::tuple<double, Method, double>, std::pair<double, std::size_t>> acc;
    for (const auto& r : rows) {
        auto& [s, n] = acc[{r.gamma, r.method, r.budget}];
        s += r.scaled_error;
        ++n;
    }
    std::vector<ErrorSummary> out;
    for (const auto& [key, v] : acc)
        out.push_back({std::get<1>(key), std::get<2>(key), std::get<0>(key), v.first / static_cast<double>(v.second),
                       v.second});
    return out;
}

} // namespace ipsketch
