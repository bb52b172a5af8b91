#pragma once

// Benchmark helpers shared by the CLI and the test suite: chain formulae and
// a wall-clock harness for the entailment decider.

#include <chrono>

#include "cl/decide.hpp"

namespace cl {

inline Formula chain_formula(std::size_t n, const Action& a = "a",
                             Formula tail = f_top()) {
    Formula f = std::move(tail);
    for (std::size_t i = 0; i < n; ++i) f = f_may(a, f);
    return f;
}

// Milliseconds for `repeat` entailment checks on depth-n chains, after one
// warm-up run.
inline double bench_entail_chain(std::size_t n, int repeat = 50) {
    Formula f = chain_formula(n, "a", f_bang({"b"}));
    Formula g = chain_formula(n, "a", f_bang({"b", "c"}));
    if (!entails(f, g)) throw std::logic_error("bench: chain entailment broken");
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeat; ++i) {
        if (!entails(f, g)) throw std::logic_error("bench: chain entailment broken");
    }
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

} // namespace cl
