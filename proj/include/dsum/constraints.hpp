#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dsum/expr.hpp"

namespace dsum {

// Dyadic comparison relations.  Sim is two-sided Lesssim; Ll/Gg are strict
// lattice gaps; Le/Ge are exact (no slack).
enum class Relation { Lesssim, Gtrsim, Sim, Ll, Gg, Le, Ge };

const char* relation_symbol(Relation r);
std::optional<Relation> relation_from_symbol(const std::string& sym);

// One side of a constraint: a monomial, or min/max of >= 2 monomials.
// min/max sides get resolved into plain monomials by the reducer's splitter.
struct ConstraintTerm {
    std::variant<Monomial, MinMaxFactor> node;

    static ConstraintTerm mono(Monomial m) { return {std::move(m)}; }
    static ConstraintTerm min_of(std::vector<Monomial> args) {
        return {MinMaxFactor{true, std::move(args), SymExp(Rational(1))}};
    }
    static ConstraintTerm max_of(std::vector<Monomial> args) {
        return {MinMaxFactor{false, std::move(args), SymExp(Rational(1))}};
    }

    bool is_mono() const { return std::holds_alternative<Monomial>(node); }
    const Monomial& as_mono() const { return std::get<Monomial>(node); }

    std::set<std::string> variables() const;
    ConstraintTerm substituted(const std::map<std::string, Rational>& bindings) const;
    std::string str() const;
};

struct Constraint {
    ConstraintTerm lhs;
    Relation rel = Relation::Lesssim;
    ConstraintTerm rhs;

    static Constraint make(Monomial lhs, Relation rel, Monomial rhs) {
        return {ConstraintTerm::mono(std::move(lhs)), rel, ConstraintTerm::mono(std::move(rhs))};
    }

    bool is_pure_monomial() const { return lhs.is_mono() && rhs.is_mono(); }
    std::set<std::string> variables() const;
    Constraint substituted(const std::map<std::string, Rational>& bindings) const;
    std::string str() const { return lhs.str() + " " + relation_symbol(rel) + " " + rhs.str(); }
};

// log2 slack constants for the dyadic relations.
struct SlackConfig {
    std::int64_t c_lesssim = 2; // |log2 slack| for <~ / >~
    std::int64_t c_sim = 1;     // two-sided slack for ~
    std::int64_t gap_ll = 3;    // lattice gap for << / >>
};

// A half-space sum coeffs[v] * k_v <= bound over integer exponent vectors.
struct LinIneq {
    std::map<std::string, Rational> coeffs;
    Rational bound;

    bool is_trivially_true() const { return coeffs.empty() && bound >= Rational(0); }
    bool is_trivially_false() const { return coeffs.empty() && bound < Rational(0); }
    std::string str() const;
};

// Interval for one variable implied by a region; either side may be missing.
struct VarBounds {
    std::optional<std::int64_t> lo;
    std::optional<std::int64_t> hi;
};

class LogRegion {
  public:
    LogRegion() = default;
    explicit LogRegion(std::vector<LinIneq> ineqs) : ineqs_(std::move(ineqs)) { canonicalize(); }

    const std::vector<LinIneq>& inequalities() const { return ineqs_; }
    void add(LinIneq ineq) {
        ineqs_.push_back(std::move(ineq));
        canonicalize();
    }

    // Membership with exact rational arithmetic; missing variable -> error.
    bool contains(const Assignment& point) const;

    // Tightest integer interval for v given the other variables fixed.
    // pre: every inequality mentioning v has its other variables in `fixed`.
    VarBounds bounds_for(const std::string& v, const Assignment& fixed) const;

    // true when some inequality is the impossible 0 <= negative.
    bool trivially_infeasible() const;

    std::set<std::string> variables() const;

  private:
    void canonicalize();
    std::vector<LinIneq> ineqs_;
};

// Linearize dyadic constraints into half-spaces in log2 space.  All sides
// must be pure monomials (run the splitter first when min/max appear).
LinIneq linearize_one_sided(const Monomial& lhs, const Monomial& rhs, Rational bound);
std::vector<LinIneq> linearize_constraint(const Constraint& c, const SlackConfig& slack);
LogRegion linearize(const std::vector<Constraint>& cs, const SlackConfig& slack);

} // namespace dsum
