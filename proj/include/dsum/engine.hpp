#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsum/problem.hpp"
#include "dsum/reducer.hpp"

namespace dsum {

struct TruncatedSum {
    long double value = 0.0L;
    bool complete = true;        // false when the node budget ran out
    std::uint64_t nodes = 0;     // lattice-walk nodes visited
    std::uint64_t terms = 0;     // summand evaluations
};

// Exact truncated sum of the summand over linearize(constraints) intersected
// with [-K, K]^d, param fixed at kN.  Nested iteration in declaration order;
// every inequality clips the innermost variable it mentions, so the walk
// enumerates exactly the lattice points of the region.
TruncatedSum truncated_sum_guarded(const Problem& p, int kN, int K, std::uint64_t node_budget);
double truncated_sum(const Problem& p, int kN, int K);

// true iff the last two affordable sums along K_ladder differ by < 1%.
bool cutoff_converged(const Problem& p, int kN, const std::vector<int>& K_ladder,
                      std::uint64_t node_budget = 100000000);

struct LadderPoint {
    int kn = 0;
    double sum = 0.0;
    int k_used = 0;     // truncation box that produced the sum
    double log2_sum = 0.0;
};

struct LadderResult {
    std::vector<LadderPoint> points;
    double fitted_exponent = 0.0;
    int log_degree_estimate = 0;
    double fit_quality = 0.0;
    bool divergent = false;       // failed cutoff convergence at some kN
    bool inconclusive = false;
    std::string note;
};

LadderResult growth_estimate(const Problem& p, const std::vector<int>& kn_ladder,
                             const EngineConfig& cfg);

enum class Classification { Bounded, Unbounded, LogDivergent, Inconclusive };

const char* classification_name(Classification c);
int classification_exit_code(Classification c);

struct GrowthVerdict {
    Classification classification = Classification::Inconclusive;
    double exponent = 0.0; // fitted when the numeric engine ran, exact otherwise
    int log_degree = 0;
    std::optional<SymbolicOutcome> symbolic;
    std::optional<LadderResult> ladder;
    std::vector<std::string> notes;
};

// Symbolic first; numeric as evidence (mode Both) or fallback (NotEliminable).
GrowthVerdict verdict(const Problem& p, const EngineConfig& cfg);

// Shared classification rule: exponent above tol is Unbounded; a log factor
// sitting at exponent ~0 is LogDivergent; everything else (including decay)
// is uniformly bounded in the parameter.
Classification classify_exponent(double exponent, int log_degree, double tol);

} // namespace dsum
