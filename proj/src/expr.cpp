#include "dsum/expr.hpp"

#include <cmath>

namespace dsum {

long double log2_one_plus_exp2(long double t) {
    // 1 + 2^t = 2^{max(t,0)} (1 + 2^{-|t|})
    long double head = t > 0 ? t : 0.0L;
    long double tail = std::log1pl(std::exp2l(-std::fabsl(t))) / 0.693147180559945309417232121458L;
    return head + tail;
}

std::set<std::string> Summand::variables() const {
    std::set<std::string> out;
    for (const auto& f : factors_) {
        std::visit([&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, MonoFactor>) {
                node.mono.collect_variables(out);
            } else if constexpr (std::is_same_v<T, BracketFactor>) {
                node.arg.collect_variables(out);
            } else {
                for (const auto& m : node.args) m.collect_variables(out);
            }
        }, f.node);
    }
    return out;
}

bool Summand::is_concrete() const {
    for (const auto& f : factors_) {
        bool ok = std::visit([&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, MonoFactor>) {
                return node.mono.is_concrete();
            } else if constexpr (std::is_same_v<T, BracketFactor>) {
                return node.arg.is_concrete() && node.power.is_concrete();
            } else {
                if (!node.power.is_concrete()) return false;
                for (const auto& m : node.args)
                    if (!m.is_concrete()) return false;
                return true;
            }
        }, f.node);
        if (!ok) return false;
    }
    return true;
}

bool Summand::is_pure_monomial() const {
    for (const auto& f : factors_)
        if (!std::holds_alternative<MonoFactor>(f.node)) return false;
    return true;
}

long double Summand::eval_log2(const Assignment& a) const {
    long double total = 0.0L;
    for (const auto& f : factors_) {
        total += std::visit([&](const auto& node) -> long double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, MonoFactor>) {
                return (long double)node.mono.eval_log2(a).to_double();
            } else if constexpr (std::is_same_v<T, BracketFactor>) {
                // (1+X^2)^{p/2}
                Rational e = node.arg.eval_log2(a);
                long double p = (long double)node.power.value().to_double();
                return p / 2.0L * log2_one_plus_exp2(2.0L * (long double)e.to_double());
            } else {
                Rational best = node.args.front().eval_log2(a);
                for (std::size_t i = 1; i < node.args.size(); ++i) {
                    Rational e = node.args[i].eval_log2(a);
                    if (node.is_min ? e < best : e > best) best = e;
                }
                long double p = (long double)node.power.value().to_double();
                return p * (long double)best.to_double();
            }
        }, f.node);
    }
    return total;
}

long double Summand::eval(const Assignment& a) const { return std::exp2l(eval_log2(a)); }

Summand Summand::substituted(const std::map<std::string, Rational>& bindings) const {
    std::vector<Factor> out;
    out.reserve(factors_.size());
    for (const auto& f : factors_) {
        out.push_back(std::visit([&](const auto& node) -> Factor {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, MonoFactor>) {
                return Factor::mono(node.mono.substituted(bindings));
            } else if constexpr (std::is_same_v<T, BracketFactor>) {
                return Factor::bracket(node.arg.substituted(bindings),
                                       node.power.substituted(bindings));
            } else {
                std::vector<Monomial> args;
                args.reserve(node.args.size());
                for (const auto& m : node.args) args.push_back(m.substituted(bindings));
                MinMaxFactor mm{node.is_min, std::move(args), node.power.substituted(bindings)};
                return Factor{mm};
            }
        }, f.node));
    }
    return Summand(std::move(out));
}

namespace {

std::string power_suffix(const SymExp& p) {
    if (p == SymExp(Rational(1))) return "";
    return "^(" + p.str() + ")";
}

} // namespace

std::string Monomial::str() const {
    std::vector<std::string> parts;
    if (!coeff_log2_.is_zero()) parts.push_back("2" + power_suffix(coeff_log2_));
    for (const auto& [name, p] : powers_) parts.push_back(name + power_suffix(p));
    if (parts.empty()) return "1";
    std::string out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) out += "*" + parts[i];
    return out;
}

std::string Summand::str() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) out += " * ";
        out += std::visit([&](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, MonoFactor>) {
                return node.mono.str();
            } else if constexpr (std::is_same_v<T, BracketFactor>) {
                return "<" + node.arg.str() + ">" + power_suffix(node.power);
            } else {
                std::string s = node.is_min ? "min{" : "max{";
                for (std::size_t j = 0; j < node.args.size(); ++j) {
                    if (j) s += ", ";
                    s += node.args[j].str();
                }
                s += "}";
                return s + power_suffix(node.power);
            }
        }, factors_[i].node);
    }
    return out;
}

double eval_summand(const Summand& s, const Assignment& a) { return (double)s.eval(a); }

double eval_mono(const Monomial& m, const Assignment& a) {
    return (double)std::exp2l((long double)m.eval_log2(a).to_double());
}

Summand substitute_params(const Summand& s, const std::map<std::string, Rational>& bindings) {
    Summand out = s.substituted(bindings);
    if (!out.is_concrete()) {
        // surface the first unbound name via the SymExp error path
        for (const auto& f : out.factors()) {
            std::visit([&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, MonoFactor>) {
                    node.mono.coeff_log2().value();
                    for (const auto& [n, p] : node.mono.powers()) p.value();
                } else if constexpr (std::is_same_v<T, BracketFactor>) {
                    node.power.value();
                    for (const auto& [n, p] : node.arg.powers()) p.value();
                } else {
                    node.power.value();
                    for (const auto& m : node.args)
                        for (const auto& [n, p] : m.powers()) p.value();
                }
            }, f.node);
        }
    }
    return out;
}

} // namespace dsum
