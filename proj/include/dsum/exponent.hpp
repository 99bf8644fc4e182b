#pragma once

#include <map>
#include <string>

#include "dsum/rational.hpp"

namespace dsum {

// An exponent that may still mention named parameters (s, theta, eps, ...)
// as an affine combination  constant + sum coeff_i * symbol_i.
// Everything the paper puts in an exponent has this shape.
class SymExp {
  public:
    SymExp() = default;
    SymExp(Rational constant) : constant_(constant) {}
    SymExp(std::int64_t constant) : constant_(Rational(constant)) {}

    static SymExp symbol(const std::string& name, Rational coeff = Rational(1)) {
        SymExp e;
        if (!coeff.is_zero()) e.terms_[name] = coeff;
        return e;
    }

    const Rational& constant() const { return constant_; }
    const std::map<std::string, Rational>& terms() const { return terms_; }

    bool is_concrete() const { return terms_.empty(); }
    bool is_zero() const { return constant_.is_zero() && terms_.empty(); }

    // Concrete value; throws naming the first unbound symbol otherwise.
    Rational value() const {
        if (!terms_.empty())
            throw Error("unbound symbol in exponent: " + terms_.begin()->first);
        return constant_;
    }

    SymExp substituted(const std::map<std::string, Rational>& bindings) const {
        SymExp out(constant_);
        for (const auto& [name, coeff] : terms_) {
            auto it = bindings.find(name);
            if (it == bindings.end())
                out.terms_[name] = coeff;
            else
                out.constant_ += coeff * it->second;
        }
        return out;
    }

    friend SymExp operator+(const SymExp& a, const SymExp& b) {
        SymExp out = a;
        out.constant_ += b.constant_;
        for (const auto& [name, coeff] : b.terms_) {
            Rational c = out.term(name) + coeff;
            if (c.is_zero())
                out.terms_.erase(name);
            else
                out.terms_[name] = c;
        }
        return out;
    }
    friend SymExp operator-(const SymExp& a, const SymExp& b) { return a + (-b); }
    SymExp operator-() const {
        SymExp out(-constant_);
        for (const auto& [name, coeff] : terms_) out.terms_[name] = -coeff;
        return out;
    }
    friend SymExp operator*(const Rational& k, const SymExp& e) {
        SymExp out(k * e.constant_);
        if (!k.is_zero())
            for (const auto& [name, coeff] : e.terms_) out.terms_[name] = k * coeff;
        return out;
    }

    friend bool operator==(const SymExp& a, const SymExp& b) {
        return a.constant_ == b.constant_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const SymExp& a, const SymExp& b) { return !(a == b); }

    std::string str() const {
        std::string out = constant_.str();
        for (const auto& [name, coeff] : terms_) {
            out += coeff.sign() < 0 ? "-" : "+";
            Rational a = coeff.sign() < 0 ? -coeff : coeff;
            if (a != Rational(1)) out += a.str() + "*";
            out += name;
        }
        return out;
    }

  private:
    Rational term(const std::string& name) const {
        auto it = terms_.find(name);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_;
    std::map<std::string, Rational> terms_;
};

} // namespace dsum
