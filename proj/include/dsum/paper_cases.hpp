#pragma once

#include <array>
#include <string>
#include <vector>

#include "dsum/engine.hpp"
#include "dsum/problem.hpp"

namespace dsum {

// (n, s, theta) with exact rational indices.
struct Triple {
    int n = 2;
    Rational s;
    Rational theta;

    std::string str() const {
        return "(" + std::to_string(n) + ", " + s.str() + ", " + theta.str() + ")";
    }
};

// Admissibility region of the bilinear estimates:
//   n=2, 1/2 < theta != 3/4:  max{theta-5/4, 2theta-2} <= s < 0
//   n=2, theta = 3/4:         -1/2 < s < 0
//   n=3, theta > 1/2:         2theta-3/2 <= s < 0
bool is_admissible(const Triple& t);

// The simpler sufficient region (theta-1)/2 < s < 0, theta > 1/2, n in {2,3}.
bool satisfies_23ts(const Triple& t);

enum class EstimateKind { Cucv, Uv, Cuv, OmegaCuv };
const char* estimate_kind_name(EstimateKind k);
std::optional<EstimateKind> estimate_kind_from_name(const std::string& name);

enum class Modulation { Low, High };
enum class Subcase { PlusPlusPlus, Separated, Coherence, Generic };
enum class SizePattern { Sorted, AllComparable, SmallStrict, SmallGtrsim };

enum class NRole { Max, Med, Min };
enum class LRole { Min, Med, Max };

struct RoleAssignment {
    std::array<NRole, 3> n_role{NRole::Max, NRole::Med, NRole::Min}; // index i -> role of N_{i+1}
    std::array<LRole, 3> l_role{LRole::Min, LRole::Med, LRole::Max}; // index i -> role of L_{i+1}
    std::string str() const;
};

struct EstimateCase {
    EstimateKind kind = EstimateKind::Cucv;
    Modulation modulation = Modulation::Low;
    Subcase subcase = Subcase::PlusPlusPlus;
    SizePattern pattern = SizePattern::Sorted;
    RoleAssignment roles;
    int coherent_index = -1; // 0-based index carrying H ~ L_c in the coherence subcase
    int n = 2;

    std::string label() const;
};

// The Bourgain-weight part of the summand, written in role variables.
Summand weight(EstimateKind kind, const RoleAssignment& roles, const Triple& t);

// The multiplier-norm bound for the subcase, in role variables plus H;
// exponents still symbolic in s/theta/eps until substitute_params.
Summand norm_bound(const EstimateCase& c);

// Full constraint list for the case, including size-pattern and modulation
// relations and the parameter pin Nmax ~ N.
std::vector<Constraint> structural_constraints(const EstimateCase& c);

// epsilon used by the generic (++-) bound: 0 for n=2, min(1/16,(theta-1/2)/2) for n=3.
Rational epsilon_for(const Triple& t);

struct CompiledCase {
    EstimateCase kase;
    Problem problem;
    std::vector<std::string> merged_labels; // role variants collapsed by dedupe
};

// One Problem per (modulation, subcase, pattern, role assignment), with
// identical problems deduplicated.  Vacuous combinations stay in the list and
// are expected to verify as empty sums.
std::vector<CompiledCase> build_problems(EstimateKind kind, const Triple& t,
                                         const SlackConfig& slack = {});

struct CaseVerdict {
    std::string label;
    GrowthVerdict verdict;
};

struct EstimateReport {
    EstimateKind kind = EstimateKind::Cucv;
    Triple t;
    std::vector<CaseVerdict> cases;
    Classification overall = Classification::Inconclusive;
    bool reference = false; // is_admissible (cucv/uv) or satisfies_23ts (cuv/omega-cuv)
    std::vector<std::string> failing;
};

EstimateReport verify_estimate(EstimateKind kind, const Triple& t, const EngineConfig& cfg);

struct SweepRow {
    Triple t;
    EstimateKind kind = EstimateKind::Cucv;
    Classification verdict = Classification::Inconclusive;
    bool divergent_at_fixed_param = false;
    std::optional<Rational> exact_exponent; // from the symbolic engine
    double exponent = 0.0;
    int log_degree = 0;
    bool reference = false;
    bool match = false;
};

std::vector<SweepRow> sweep(EstimateKind kind, int n, Rational s_lo, Rational s_hi,
                            Rational s_step, Rational th_lo, Rational th_hi, Rational th_step,
                            const EngineConfig& cfg);

std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace dsum
