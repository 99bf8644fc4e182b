#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dsum/exponent.hpp"
#include "dsum/rational.hpp"

namespace dsum {

// Assignment of integer log2 values to dyadic variables: v = 2^{assignment[v]}.
using Assignment = std::map<std::string, std::int64_t>;

struct EvalError : Error {
    using Error::Error;
};

// A dyadic monomial 2^{coeff_log2} * prod v^{powers[v]}.  The coefficient is a
// power of two by construction (everything in scope is); zero powers are not
// stored.
class Monomial {
  public:
    Monomial() = default;
    explicit Monomial(Rational coeff_log2) : coeff_log2_(SymExp(coeff_log2)) {}

    static Monomial var(const std::string& name, SymExp power = SymExp(Rational(1))) {
        Monomial m;
        m.set_power(name, power);
        return m;
    }
    static Monomial one() { return Monomial(); }
    static Monomial power_of_two(Rational log2_value) { return Monomial(log2_value); }

    const SymExp& coeff_log2() const { return coeff_log2_; }
    const std::map<std::string, SymExp>& powers() const { return powers_; }

    void set_coeff_log2(SymExp c) { coeff_log2_ = std::move(c); }
    void set_power(const std::string& name, SymExp power) {
        if (power.is_zero())
            powers_.erase(name);
        else
            powers_[name] = std::move(power);
    }
    SymExp power(const std::string& name) const {
        auto it = powers_.find(name);
        return it == powers_.end() ? SymExp() : it->second;
    }

    Monomial operator*(const Monomial& o) const {
        Monomial out = *this;
        out.coeff_log2_ = out.coeff_log2_ + o.coeff_log2_;
        for (const auto& [name, p] : o.powers_) out.set_power(name, out.power(name) + p);
        return out;
    }
    // this^k
    Monomial pow(const Rational& k) const {
        Monomial out;
        out.coeff_log2_ = k * coeff_log2_;
        for (const auto& [name, p] : powers_) out.set_power(name, k * p);
        return out;
    }

    bool is_concrete() const {
        if (!coeff_log2_.is_concrete()) return false;
        for (const auto& [name, p] : powers_)
            if (!p.is_concrete()) return false;
        return true;
    }

    Monomial substituted(const std::map<std::string, Rational>& bindings) const {
        Monomial out;
        out.coeff_log2_ = coeff_log2_.substituted(bindings);
        for (const auto& [name, p] : powers_) out.set_power(name, p.substituted(bindings));
        return out;
    }

    // Exact log2 of the value at a dyadic assignment.
    Rational eval_log2(const Assignment& a) const {
        Rational e = coeff_log2_.value();
        for (const auto& [name, p] : powers_) {
            auto it = a.find(name);
            if (it == a.end()) throw EvalError("missing variable in assignment: " + name);
            e += p.value() * Rational(it->second);
        }
        return e;
    }

    void collect_variables(std::set<std::string>& into) const {
        for (const auto& [name, p] : powers_) into.insert(name);
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.coeff_log2_ == b.coeff_log2_ && a.powers_ == b.powers_;
    }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

    std::string str() const;

  private:
    SymExp coeff_log2_;
    std::map<std::string, SymExp> powers_;
};

// Factor variants.  Bracket(X)^p denotes the Japanese bracket (1+X^2)^{p/2};
// Min/Max hold >= 2 pairwise distinct monomials under a common power.
struct MonoFactor {
    Monomial mono;
};
struct BracketFactor {
    Monomial arg;
    SymExp power;
};
struct MinMaxFactor {
    bool is_min = true;
    std::vector<Monomial> args;
    SymExp power;
};

struct Factor {
    std::variant<MonoFactor, BracketFactor, MinMaxFactor> node;

    static Factor mono(Monomial m) { return {MonoFactor{std::move(m)}}; }
    static Factor bracket(Monomial arg, SymExp power) {
        return {BracketFactor{std::move(arg), std::move(power)}};
    }
    static Factor min_of(std::vector<Monomial> args, SymExp power) {
        return {MinMaxFactor{true, std::move(args), std::move(power)}};
    }
    static Factor max_of(std::vector<Monomial> args, SymExp power) {
        return {MinMaxFactor{false, std::move(args), std::move(power)}};
    }
};

// Product of factors; strictly positive at every dyadic assignment.
class Summand {
  public:
    Summand() = default;
    explicit Summand(std::vector<Factor> factors) : factors_(std::move(factors)) {}

    const std::vector<Factor>& factors() const { return factors_; }
    std::vector<Factor>& factors() { return factors_; }
    void append(Factor f) { factors_.push_back(std::move(f)); }

    std::set<std::string> variables() const;
    bool is_concrete() const;
    bool is_pure_monomial() const;

    // log2 of the value at a dyadic assignment; brackets are transcendental,
    // so this is the one place floating point enters.
    long double eval_log2(const Assignment& a) const;
    long double eval(const Assignment& a) const;

    Summand substituted(const std::map<std::string, Rational>& bindings) const;

    std::string str() const;

  private:
    std::vector<Factor> factors_;
};

// eval_summand / eval_mono / substitute_params of the spec surface.
double eval_summand(const Summand& s, const Assignment& a);
double eval_mono(const Monomial& m, const Assignment& a);
Summand substitute_params(const Summand& s, const std::map<std::string, Rational>& bindings);

// log2(1 + 2^{t}) computed without overflow for any t.
long double log2_one_plus_exp2(long double t);

} // namespace dsum
