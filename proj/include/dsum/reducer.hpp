#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsum/constraints.hpp"
#include "dsum/problem.hpp"

namespace dsum {

// One piece of the exhaustive region split: a pure-monomial summand plus the
// extra constraints that carve this piece out of the lattice.  Sibling
// branches partition the lattice exactly (brackets split at the X <= 1
// threshold, min/max on which argument is extremal, ties to the first).
struct Branch {
    Monomial summand;
    std::vector<Constraint> extra_constraints;
    std::vector<std::string> provenance;
};

// Eliminate every Bracket/Min/Max in the summand and every min/max side in
// the constraints.  Returned branches carry partition constraints plus the
// per-branch rewrites of min/max-bearing constraints; pure-monomial input
// constraints are shared and not repeated (see pure_monomial_subset).
std::vector<Branch> split(const Summand& s, const std::vector<Constraint>& cs);

std::vector<Constraint> pure_monomial_subset(const std::vector<Constraint>& cs);

// Growth of a fully eliminated branch: param^exponent * (log param)^log_degree.
struct SymbolicGrowth {
    Rational exponent;
    int log_degree = 0;
};

struct SymbolicOutcome {
    enum class Kind {
        Growth,                // finite at fixed param, exact exponent below
        DivergentAtFixedParam, // some inner sum has no bound on its divergent side
        Empty,                 // no branch is feasible for large param
        NotEliminable,         // subbranch budget exhausted; numeric engine decides
    };
    Kind kind = Kind::Empty;
    SymbolicGrowth growth;
    std::string witness;                // branch provenance / divergent variable
    std::size_t branch_count = 0;       // branches out of split()
    std::size_t live_branch_count = 0;  // feasible for arbitrarily large param
};

// Single-step elimination of one variable, exposed for the oracle tests.
// Result branches no longer mention v; a zero-exponent elimination reports
// the (upper, lower) bound pair whose log-extent is the term count.
struct ElimBranch {
    Monomial summand;
    LogRegion region;
    std::optional<std::pair<Monomial, Monomial>> log_extent;
    std::string note;
};
struct ElimResult {
    enum class Kind { Ok, Divergent } kind = Kind::Ok;
    std::vector<ElimBranch> branches;
    std::string note;
};
ElimResult eliminate_var(const Monomial& summand, const LogRegion& region, const std::string& v);

// Full symbolic pipeline: split, linearize, eliminate everything but the
// parameter in the problem's elimination order, max over live branches.
SymbolicOutcome symbolic_growth(const Problem& p, const EngineConfig& cfg);

} // namespace dsum
