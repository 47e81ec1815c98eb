// Estimates join size, SUM and MEAN between two small tables from sketches.

#include <cstdio>

#include <ipsketch/ipsketch.hpp>

using namespace ipsketch;

int main() {
    const KeyedColumn a(16, {1, 3, 4, 5, 6, 7, 8, 9, 11}, std::vector<double>{6, 2, 6, 1, 4, 2, 2, 8, 3});
    const KeyedColumn b(16, {2, 4, 5, 8, 10, 11, 12, 15, 16}, std::vector<double>{1, 5, 1, 2, 4, 2.5, 6, 6, 3.7});

    const auto exact = exact_join_stats(a, b);
    std::printf("exact:  size %.3f  sum %.3f  mean %.3f\n", exact.join_size, exact.sum_a, *exact.mean_a);

    for (Method method : {Method::wmh, Method::mh, Method::jl}) {
        SketchParams p{method, 16, 2000, 0, 0, 42, Strategy::none};
        if (method == Method::wmh) {
            p.L = 1'000'000;
            p.strategy = Strategy::fast;
        }
        const auto s = estimate_join_stats(make_sketch(encode_value_column(a), p),
                                           make_sketch(encode_key_indicator(a), p),
                                           make_sketch(encode_key_indicator(b), p));
        std::printf("%-6s  size %.3f  sum %.3f  mean ", std::string(method_name(method)).c_str(), s.join_size,
                    s.sum_a);
        if (s.mean_a)
            std::printf("%.3f\n", *s.mean_a);
        else
            std::printf("undefined\n");
    }
}
