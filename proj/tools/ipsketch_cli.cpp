// ipsketch: build sketches from vector or table files, estimate inner products
// and join statistics, and run the synthetic benchmark.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ipsketch/ipsketch.hpp>

using namespace ipsketch;

namespace {

struct SketchArgs {
    std::string method;
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
    std::uint64_t L = kDefaultL;
    std::string strategy = "fast";
    std::uint64_t r = kDefaultCsRepetitions;
    std::string input;
    std::string format = "vec";
    std::string column;
    bool header = false;
    bool hash_keys = false;
    std::uint64_t n = 0;
    std::string out;
    bool json = false;
};

struct BenchArgs {
    std::uint64_t n = 10000;
    std::uint64_t nnz = 2000;
    std::vector<double> overlap{0.01, 0.05, 0.10, 0.50};
    double outlier_frac = 0.10;
    std::vector<double> budgets{400};
    std::vector<std::string> methods{"WMH", "MH", "KMV", "JL", "CS"};
    std::uint64_t trials = 10;
    std::uint64_t seed = 0;
    std::uint64_t L = kDefaultL;
    std::string strategy = "fast";
    std::string out;
    bool summary = false;
};

SparseVector load_input(const SketchArgs& a) {
    std::ifstream in(a.input);
    if (!in) detail::fail("cannot open '" + a.input + "'");
    if (a.format == "vec") {
        auto v = read_vector_text(in);
        if (a.n != 0 && a.n != v.dim()) detail::fail("--n does not match the dimension in the vector file");
        return v;
    }
    const auto col = read_column_csv(in, CsvOptions{a.header, a.hash_keys, a.n});
    std::string which = a.column.empty() ? (col.has_values() ? "value" : "key") : a.column;
    if (which == "key") return encode_key_indicator(col);
    if (which == "value") return encode_value_column(col);
    detail::fail("--column must be 'key' or 'value'");
}

int run_sketch(const SketchArgs& a) {
    const SparseVector v = load_input(a);
    SketchParams p{parse_method(a.method), v.dim(), a.m, 0, 0, a.seed, Strategy::none};
    if (p.method == Method::wmh) {
        p.L = a.L;
        p.strategy = parse_strategy(a.strategy);
    }
    if (p.method == Method::cs) p.r = a.r;
    const AnySketch s = make_sketch(v, p);
    save_sketch(a.out, s, a.json ? SketchFormat::json : SketchFormat::binary);
    return 0;
}

int run_estimate(const std::string& fa, const std::string& fb) {
    std::printf("%.17g\n", estimate(load_sketch(fa), load_sketch(fb)));
    return 0;
}

int run_join_stats(const std::string& va, const std::string& ka, const std::string& kb) {
    const auto s = estimate_join_stats(load_sketch(va), load_sketch(ka), load_sketch(kb));
    nlohmann::json j;
    j["join_size"] = s.join_size;
    j["sum_a"] = s.sum_a;
    if (s.mean_a)
        j["mean_a"] = *s.mean_a;
    else
        j["mean_a"] = nullptr;
    std::cout << j.dump(1) << '\n';
    return 0;
}

int run_bench(const BenchArgs& a) {
    std::vector<Method> methods;
    for (const auto& m : a.methods) methods.push_back(parse_method(m));
    BenchOptions opt;
    opt.L = a.L;
    opt.strategy = parse_strategy(a.strategy);

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) detail::fail("cannot open '" + a.out + "' for writing");
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    out << kCsvHeader << '\n';
    std::vector<EstimateReport> all;
    for (double g : a.overlap) {
        SyntheticConfig cfg;
        cfg.n = a.n;
        cfg.nnz = a.nnz;
        cfg.gamma = g;
        cfg.outlier_frac = a.outlier_frac;
        cfg.trials = a.trials;
        cfg.seed = a.seed;
        const auto rows = run_experiment(cfg, methods, a.budgets, opt);
        write_csv(out, rows, false);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    if (a.summary)
        for (const auto& s : summarize(all))
            std::fprintf(stderr, "gamma=%g %-3s budget=%g mean_scaled_error=%.5f (%zu trials)\n", s.gamma,
                         std::string(method_name(s.method)).c_str(), s.budget, s.mean_scaled_error, s.count);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inner-product sketches for sparse vectors and tables"};
    app.require_subcommand(1);

    SketchArgs sk;
    auto* sketch = app.add_subcommand("sketch", "Sketch a vector or table column");
    sketch->add_option("--method", sk.method, "MH, WMH, KMV, JL or CS")->required();
    sketch->add_option("--m", sk.m, "Samples (MH/WMH/KMV), rows (JL) or buckets (CS)")->required();
    sketch->add_option("--seed", sk.seed, "Master seed");
    sketch->add_option("--L", sk.L, "WMH discretization parameter")->capture_default_str();
    sketch->add_option("--strategy", sk.strategy, "WMH strategy: fast or exact")->capture_default_str();
    sketch->add_option("--r", sk.r, "CountSketch repetitions")->capture_default_str();
    sketch->add_option("--input", sk.input, "Input file")->required();
    sketch->add_option("--format", sk.format, "vec (n=<dim> + 'index value' lines) or csv")
        ->check(CLI::IsMember({"vec", "csv"}))
        ->capture_default_str();
    sketch->add_option("--column", sk.column, "For csv: encode 'key' indicator or 'value' column")
        ->check(CLI::IsMember({"key", "value"}));
    sketch->add_flag("--header", sk.header, "CSV has a header row");
    sketch->add_flag("--hash-keys", sk.hash_keys, "Hash string keys into [1, 2^32]");
    sketch->add_option("--n", sk.n, "Dimension / key domain size");
    sketch->add_option("--out", sk.out, "Output sketch file")->required();
    sketch->add_flag("--json", sk.json, "Write the JSON form instead of binary");

    std::string ea, eb;
    auto* est = app.add_subcommand("estimate", "Estimate <a, b> from two sketch files");
    est->add_option("A", ea)->required();
    est->add_option("B", eb)->required();

    std::string jva, jka, jkb;
    auto* join = app.add_subcommand("join-stats", "Join size, SUM and MEAN from three sketches");
    join->add_option("VA", jva, "Sketch of table A's value column")->required();
    join->add_option("KA", jka, "Sketch of table A's key indicator")->required();
    join->add_option("KB", jkb, "Sketch of table B's key indicator")->required();

    BenchArgs bn;
    auto* bench = app.add_subcommand("synth-bench", "Synthetic matched-storage benchmark (CSV)");
    bench->add_option("--n", bn.n)->capture_default_str();
    bench->add_option("--nnz", bn.nnz)->capture_default_str();
    bench->add_option("--overlap", bn.overlap, "Overlap fractions")->delimiter(',')->capture_default_str();
    bench->add_option("--outlier-frac", bn.outlier_frac)->capture_default_str();
    bench->add_option("--budgets", bn.budgets, "Storage budgets in 64-bit words")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--methods", bn.methods)->delimiter(',')->capture_default_str();
    bench->add_option("--trials", bn.trials)->capture_default_str();
    bench->add_option("--seed", bn.seed)->capture_default_str();
    bench->add_option("--L", bn.L)->capture_default_str();
    bench->add_option("--strategy", bn.strategy)->capture_default_str();
    bench->add_option("--out", bn.out, "CSV output file (default: stdout)");
    bench->add_flag("--summary", bn.summary, "Print mean scaled errors to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sketch) return run_sketch(sk);
        if (*est) return run_estimate(ea, eb);
        if (*join) return run_join_stats(jva, jka, jkb);
        if (*bench) return run_bench(bn);
    } catch (const InvalidInput& e) {
        std::cerr << "ipsketch: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ipsketch: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
