#pragma once

#include <string>
#include <vector>

#include "dsum/constraints.hpp"
#include "dsum/expr.hpp"

namespace dsum {

enum class VarRole { Summation, GrowthParam, FixedSymbol };

struct DyadicVar {
    std::string name;
    VarRole role = VarRole::Summation;
};

// One unit of verification: a summand, its constraints, an ordered list of
// summation variables (outermost first), and the distinguished growth
// parameter.  Immutable in use; the REPL copies before editing.
struct Problem {
    Summand summand;
    std::vector<Constraint> constraints;
    std::vector<DyadicVar> variables; // summation variables, declaration order
    std::string param;
    SlackConfig slack;
    std::string name; // for reports

    // default elimination order: innermost (= last declared) first;
    // paper-built problems override to match the written proof order
    std::vector<std::string> elimination_order;

    std::vector<std::string> summation_names() const {
        std::vector<std::string> out;
        out.reserve(variables.size());
        for (const auto& v : variables) out.push_back(v.name);
        return out;
    }

    std::vector<std::string> effective_elimination_order() const {
        if (!elimination_order.empty()) return elimination_order;
        auto names = summation_names();
        return {names.rbegin(), names.rend()};
    }

    // Throws on structural problems (duplicate names, undeclared variables,
    // symbolic exponents).  Returns human-readable notes for soft issues
    // (e.g. param not mentioned by any constraint).
    std::vector<std::string> validate() const;
};

enum class EngineMode { Symbolic, Numeric, Both };

struct EngineConfig {
    int ladder_lo = 4;  // kN ladder: {ladder_lo, ..., ladder_hi}
    int ladder_hi = 12;
    int cutoff = 64;    // top truncation box [-K, K]
    double tol = 0.05;  // growth-exponent tolerance
    EngineMode mode = EngineMode::Both;
    std::uint64_t cost_guard = 100000000; // lattice-walk node budget per sum
    std::size_t branch_guard = 200000;    // symbolic subbranch budget

    std::vector<int> kn_ladder() const {
        std::vector<int> out;
        for (int k = ladder_lo; k <= ladder_hi; ++k) out.push_back(k);
        return out;
    }
    // ascending truncation ladder ending at `cutoff`
    std::vector<int> k_ladder() const {
        std::vector<int> base{4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128};
        std::vector<int> out;
        for (int k : base)
            if (k < cutoff) out.push_back(k);
        out.push_back(cutoff);
        return out;
    }
};

} // namespace dsum
