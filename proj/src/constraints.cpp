#include "dsum/constraints.hpp"

#include <algorithm>

namespace dsum {

const char* relation_symbol(Relation r) {
    switch (r) {
        case Relation::Lesssim: return "<~";
        case Relation::Gtrsim: return ">~";
        case Relation::Sim: return "~";
        case Relation::Ll: return "<<";
        case Relation::Gg: return ">>";
        case Relation::Le: return "<=";
        case Relation::Ge: return ">=";
    }
    return "?";
}

std::optional<Relation> relation_from_symbol(const std::string& sym) {
    if (sym == "<~") return Relation::Lesssim;
    if (sym == ">~") return Relation::Gtrsim;
    if (sym == "~") return Relation::Sim;
    if (sym == "<<") return Relation::Ll;
    if (sym == ">>") return Relation::Gg;
    if (sym == "<=") return Relation::Le;
    if (sym == ">=") return Relation::Ge;
    return std::nullopt;
}

std::set<std::string> ConstraintTerm::variables() const {
    std::set<std::string> out;
    if (is_mono()) {
        as_mono().collect_variables(out);
    } else {
        for (const auto& m : std::get<MinMaxFactor>(node).args) m.collect_variables(out);
    }
    return out;
}

ConstraintTerm ConstraintTerm::substituted(const std::map<std::string, Rational>& bindings) const {
    if (is_mono()) return ConstraintTerm::mono(as_mono().substituted(bindings));
    const auto& mm = std::get<MinMaxFactor>(node);
    std::vector<Monomial> args;
    args.reserve(mm.args.size());
    for (const auto& m : mm.args) args.push_back(m.substituted(bindings));
    return {MinMaxFactor{mm.is_min, std::move(args), mm.power}};
}

std::string ConstraintTerm::str() const {
    if (is_mono()) return as_mono().str();
    const auto& mm = std::get<MinMaxFactor>(node);
    std::string s = mm.is_min ? "min{" : "max{";
    for (std::size_t i = 0; i < mm.args.size(); ++i) {
        if (i) s += ", ";
        s += mm.args[i].str();
    }
    return s + "}";
}

std::set<std::string> Constraint::variables() const {
    std::set<std::string> out = lhs.variables();
    auto r = rhs.variables();
    out.insert(r.begin(), r.end());
    return out;
}

Constraint Constraint::substituted(const std::map<std::string, Rational>& bindings) const {
    return {lhs.substituted(bindings), rel, rhs.substituted(bindings)};
}

std::string LinIneq::str() const {
    std::string out;
    if (coeffs.empty()) out = "0";
    bool first = true;
    for (const auto& [name, c] : coeffs) {
        if (!first) out += " + ";
        first = false;
        if (c == Rational(1))
            out += "k_" + name;
        else
            out += c.str() + "*k_" + name;
    }
    return out + " <= " + bound.str();
}

bool LogRegion::contains(const Assignment& point) const {
    for (const auto& ineq : ineqs_) {
        Rational lhs(0);
        for (const auto& [name, c] : ineq.coeffs) {
            auto it = point.find(name);
            if (it == point.end()) throw EvalError("missing variable in point: " + name);
            lhs += c * Rational(it->second);
        }
        if (!(lhs <= ineq.bound)) return false;
    }
    return true;
}

VarBounds LogRegion::bounds_for(const std::string& v, const Assignment& fixed) const {
    VarBounds out;
    for (const auto& ineq : ineqs_) {
        auto vt = ineq.coeffs.find(v);
        if (vt == ineq.coeffs.end()) continue;
        Rational rest(0);
        for (const auto& [name, c] : ineq.coeffs) {
            if (name == v) continue;
            auto it = fixed.find(name);
            if (it == fixed.end())
                throw Error("not eliminable here: bound for " + v +
                            " depends on unfixed variable " + name);
            rest += c * Rational(it->second);
        }
        Rational limit = (ineq.bound - rest) / vt->second;
        if (vt->second.sign() > 0) {
            std::int64_t hi = limit.floor();
            if (!out.hi || hi < *out.hi) out.hi = hi;
        } else {
            std::int64_t lo = limit.ceil();
            if (!out.lo || lo > *out.lo) out.lo = lo;
        }
    }
    return out;
}

bool LogRegion::trivially_infeasible() const {
    for (const auto& ineq : ineqs_)
        if (ineq.is_trivially_false()) return true;
    return false;
}

std::set<std::string> LogRegion::variables() const {
    std::set<std::string> out;
    for (const auto& ineq : ineqs_)
        for (const auto& [name, c] : ineq.coeffs) out.insert(name);
    return out;
}

void LogRegion::canonicalize() {
    // drop 0 <= nonneg, dedupe identical coefficient rows keeping the tighter
    // bound, keep any 0 <= negative row so infeasibility stays visible
    std::vector<LinIneq> kept;
    for (auto& ineq : ineqs_) {
        for (auto it = ineq.coeffs.begin(); it != ineq.coeffs.end();)
            it = it->second.is_zero() ? ineq.coeffs.erase(it) : std::next(it);
        if (ineq.is_trivially_true()) continue;
        bool merged = false;
        for (auto& prev : kept) {
            if (prev.coeffs == ineq.coeffs) {
                if (ineq.bound < prev.bound) prev.bound = ineq.bound;
                merged = true;
                break;
            }
        }
        if (!merged) kept.push_back(std::move(ineq));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const LinIneq& a, const LinIneq& b) {
        auto key = [](const LinIneq& q) {
            std::string s;
            for (const auto& [name, c] : q.coeffs) s += name + ":" + c.str() + ";";
            return s;
        };
        return key(a) < key(b);
    });
    ineqs_ = std::move(kept);
}

LinIneq linearize_one_sided(const Monomial& lhs, const Monomial& rhs, Rational bound) {
    LinIneq out;
    for (const auto& [name, p] : lhs.powers()) out.coeffs[name] = p.value();
    for (const auto& [name, p] : rhs.powers()) {
        auto it = out.coeffs.find(name);
        Rational c = (it == out.coeffs.end() ? Rational(0) : it->second) - p.value();
        if (c.is_zero())
            out.coeffs.erase(name);
        else
            out.coeffs[name] = c;
    }
    out.bound = bound - (lhs.coeff_log2().value() - rhs.coeff_log2().value());
    return out;
}

std::vector<LinIneq> linearize_constraint(const Constraint& c, const SlackConfig& slack) {
    if (!c.is_pure_monomial())
        throw Error("cannot linearize min/max constraint directly (split first): " + c.str());
    const Monomial& l = c.lhs.as_mono();
    const Monomial& r = c.rhs.as_mono();
    switch (c.rel) {
        case Relation::Lesssim: return {linearize_one_sided(l, r, Rational(slack.c_lesssim))};
        case Relation::Gtrsim: return {linearize_one_sided(r, l, Rational(slack.c_lesssim))};
        case Relation::Sim:
            return {linearize_one_sided(l, r, Rational(slack.c_sim)),
                    linearize_one_sided(r, l, Rational(slack.c_sim))};
        case Relation::Ll: return {linearize_one_sided(l, r, Rational(-slack.gap_ll))};
        case Relation::Gg: return {linearize_one_sided(r, l, Rational(-slack.gap_ll))};
        case Relation::Le: return {linearize_one_sided(l, r, Rational(0))};
        case Relation::Ge: return {linearize_one_sided(r, l, Rational(0))};
    }
    throw Error("unreachable relation");
}

LogRegion linearize(const std::vector<Constraint>& cs, const SlackConfig& slack) {
    std::vector<LinIneq> all;
    for (const auto& c : cs) {
        auto part = linearize_constraint(c, slack);
        all.insert(all.end(), part.begin(), part.end());
    }
    return LogRegion(std::move(all));
}

} // namespace dsum
