#include "dsum/reducer.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <numeric>

namespace dsum {

namespace {

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

// Exact lattice comparison a REL b as a slack-free Constraint.  The variable
// part of log2(a/b) takes values in (1/D)Z on the integer lattice, so the
// strict complement of <= is a shift by one step of that lattice.
Constraint lattice_compare(const Monomial& a, const Monomial& b, bool strict) {
    Monomial d = a * b.pow(Rational(-1));
    std::int64_t D = 1;
    for (const auto& [name, p] : d.powers()) D = lcm64(D, p.value().den());
    Rational Dc = Rational(D) * d.coeff_log2().value();
    // a <= b  <=>  D*f(k) <= floor(-Dc);   a < b  <=>  D*f(k) <= ceil(-Dc) - 1
    std::int64_t t = strict ? (-Dc).ceil() - 1 : (-Dc).floor();
    Monomial lhs = d.pow(Rational(D));
    lhs.set_coeff_log2(SymExp(Rational(0)));
    return Constraint::make(lhs, Relation::Le, Monomial::power_of_two(Rational(t) - Dc));
}

struct SplitAtom {
    enum class Kind { Bracket, MinMax } kind = Kind::Bracket;
    Monomial arg;     // bracket
    Rational power;   // bracket / minmax factor power
    bool is_min = true;
    std::vector<Monomial> args;
    int factor_index = -1;     // >= 0 when the atom sits in the summand
    int constraint_index = -1; // >= 0 when it sits in a constraint side
    bool on_lhs = false;

    std::size_t arity() const { return kind == Kind::Bracket ? 2 : args.size(); }
};

// Partition constraints selecting args[pick] as the min (or max) with ties
// broken toward the first argument.
void append_selection(std::vector<Constraint>& out, const std::vector<Monomial>& args,
                      bool is_min, std::size_t pick) {
    for (std::size_t j = 0; j < args.size(); ++j) {
        if (j == pick) continue;
        bool strict = j < pick;
        if (is_min)
            out.push_back(lattice_compare(args[pick], args[j], strict));
        else
            out.push_back(lattice_compare(args[j], args[pick], strict));
    }
}

} // namespace

std::vector<Constraint> pure_monomial_subset(const std::vector<Constraint>& cs) {
    std::vector<Constraint> out;
    for (const auto& c : cs)
        if (c.is_pure_monomial()) out.push_back(c);
    return out;
}

std::vector<Branch> split(const Summand& s, const std::vector<Constraint>& cs) {
    std::vector<SplitAtom> atoms;
    for (int fi = 0; fi < (int)s.factors().size(); ++fi) {
        const Factor& f = s.factors()[fi];
        if (const auto* br = std::get_if<BracketFactor>(&f.node)) {
            SplitAtom a;
            a.kind = SplitAtom::Kind::Bracket;
            a.arg = br->arg;
            a.power = br->power.value();
            a.factor_index = fi;
            atoms.push_back(std::move(a));
        } else if (const auto* mm = std::get_if<MinMaxFactor>(&f.node)) {
            SplitAtom a;
            a.kind = SplitAtom::Kind::MinMax;
            a.is_min = mm->is_min;
            a.args = mm->args;
            a.power = mm->power.value();
            a.factor_index = fi;
            atoms.push_back(std::move(a));
        }
    }
    for (int ci = 0; ci < (int)cs.size(); ++ci) {
        for (bool lhs : {true, false}) {
            const ConstraintTerm& side = lhs ? cs[ci].lhs : cs[ci].rhs;
            if (side.is_mono()) continue;
            const auto& mm = std::get<MinMaxFactor>(side.node);
            SplitAtom a;
            a.kind = SplitAtom::Kind::MinMax;
            a.is_min = mm.is_min;
            a.args = mm.args;
            a.constraint_index = ci;
            a.on_lhs = lhs;
            atoms.push_back(std::move(a));
        }
    }

    Monomial base;
    for (const auto& f : s.factors())
        if (const auto* m = std::get_if<MonoFactor>(&f.node)) base = base * m->mono;

    std::size_t total = 1;
    for (const auto& a : atoms) total *= a.arity();

    std::vector<Branch> out;
    out.reserve(total);
    for (std::size_t t = 0; t < total; ++t) {
        std::size_t rem = t;
        std::vector<std::size_t> pick(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            pick[i] = rem % atoms[i].arity();
            rem /= atoms[i].arity();
        }

        Branch b;
        b.summand = base;
        // selected monomial per constraint-side atom, applied below
        std::map<std::pair<int, bool>, Monomial> side_choice;

        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const SplitAtom& a = atoms[i];
            if (a.kind == SplitAtom::Kind::Bracket) {
                if (pick[i] == 0) {
                    b.extra_constraints.push_back(lattice_compare(a.arg, Monomial::one(), false));
                    b.provenance.push_back("<" + a.arg.str() + "> ~ 1");
                } else {
                    b.extra_constraints.push_back(lattice_compare(Monomial::one(), a.arg, true));
                    b.summand = b.summand * a.arg.pow(a.power);
                    b.provenance.push_back("<" + a.arg.str() + "> ~ " + a.arg.str());
                }
            } else {
                append_selection(b.extra_constraints, a.args, a.is_min, pick[i]);
                const Monomial& chosen = a.args[pick[i]];
                std::string tag = (a.is_min ? "min" : "max") + std::string(" -> ") + chosen.str();
                if (a.factor_index >= 0) {
                    b.summand = b.summand * chosen.pow(a.power);
                    b.provenance.push_back(tag);
                } else {
                    side_choice[{a.constraint_index, a.on_lhs}] = chosen;
                    b.provenance.push_back("where #" + std::to_string(a.constraint_index + 1) +
                                           ": " + tag);
                }
            }
        }

        for (int ci = 0; ci < (int)cs.size(); ++ci) {
            if (cs[ci].is_pure_monomial()) continue;
            auto choose = [&](bool lhs) -> Monomial {
                const ConstraintTerm& side = lhs ? cs[ci].lhs : cs[ci].rhs;
                if (side.is_mono()) return side.as_mono();
                return side_choice.at({ci, lhs});
            };
            b.extra_constraints.push_back(Constraint::make(choose(true), cs[ci].rel, choose(false)));
        }
        out.push_back(std::move(b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// symbolic elimination
// ---------------------------------------------------------------------------

namespace {

// cst + sum coeff[i] * k_i over a fixed variable indexing
struct LinForm {
    std::vector<Rational> coeff;
    Rational cst;

    explicit LinForm(std::size_t n = 0) : coeff(n) {}

    bool operator==(const LinForm& o) const { return cst == o.cst && coeff == o.coeff; }

    LinForm& add_scaled(const LinForm& o, const Rational& k) {
        cst += k * o.cst;
        for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] += k * o.coeff[i];
        return *this;
    }
    // replace k_v by the form `value` (which must not mention v)
    void substitute(std::size_t v, const LinForm& value) {
        Rational a = coeff[v];
        if (a.is_zero()) return;
        coeff[v] = Rational(0);
        add_scaled(value, a);
    }
    bool mentions_only(std::size_t v) const {
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (i != v && !coeff[i].is_zero()) return false;
        return true;
    }
    bool constant() const {
        for (const auto& c : coeff)
            if (!c.is_zero()) return false;
        return true;
    }
};

LinForm form_of_monomial(const Monomial& m, const std::map<std::string, std::size_t>& index) {
    LinForm f(index.size());
    f.cst = m.coeff_log2().value();
    for (const auto& [name, p] : m.powers()) {
        auto it = index.find(name);
        if (it == index.end()) throw Error("variable not indexed: " + name);
        f.coeff[it->second] = p.value();
    }
    return f;
}

// ineq form(k) <= 0
LinForm form_of_ineq(const LinIneq& q, const std::map<std::string, std::size_t>& index) {
    LinForm f(index.size());
    f.cst = -q.bound;
    for (const auto& [name, c] : q.coeffs) {
        auto it = index.find(name);
        if (it == index.end()) throw Error("variable not indexed: " + name);
        f.coeff[it->second] = c;
    }
    return f;
}

Monomial monomial_of_form(const LinForm& f, const std::vector<std::string>& names) {
    Monomial m = Monomial::power_of_two(f.cst);
    for (std::size_t i = 0; i < names.size(); ++i)
        if (!f.coeff[i].is_zero()) m.set_power(names[i], SymExp(f.coeff[i]));
    return m;
}

void push_unique(std::vector<LinForm>& into, LinForm f) {
    if (f.constant() && f.cst <= Rational(0)) return; // trivially true
    for (const auto& g : into)
        if (g == f) return;
    into.push_back(std::move(f));
}

struct ElimState {
    LinForm summand;
    std::vector<LinForm> ineqs;
    std::vector<std::pair<LinForm, LinForm>> markers; // (upper, lower) log bounds
    std::vector<std::string> notes;
};

struct Divergence {
    ElimState state;
    std::size_t var = 0;
    std::string reason;
};

// Eliminate k_v from one state; appends successor states, or records a
// divergence when the needed bound side is missing.
void eliminate_one(const ElimState& st, std::size_t v, std::vector<ElimState>& out,
                   std::vector<Divergence>& divergences) {
    std::vector<LinForm> uppers, lowers, rest;
    for (const auto& q : st.ineqs) {
        Rational a = q.coeff[v];
        if (a.is_zero()) {
            rest.push_back(q);
            continue;
        }
        // a*k_v + g <= 0  =>  k_v <= -g/a (a>0)  or  k_v >= -g/a (a<0)
        LinForm bound(q.coeff.size());
        bound.add_scaled(q, Rational(-1) / a);
        bound.coeff[v] = Rational(0);
        if (a.sign() > 0) {
            bool dup = false;
            for (const auto& u : uppers) dup = dup || u == bound;
            if (!dup) uppers.push_back(std::move(bound));
        } else {
            bool dup = false;
            for (const auto& l : lowers) dup = dup || l == bound;
            if (!dup) lowers.push_back(std::move(bound));
        }
    }

    Rational c = st.summand.coeff[v];
    auto substituted_state = [&](const LinForm& value, std::vector<LinForm> ineqs,
                                 const char* how) {
        ElimState ns;
        ns.summand = st.summand;
        ns.summand.substitute(v, value);
        ns.ineqs = std::move(ineqs);
        ns.markers = st.markers;
        for (auto& [u, l] : ns.markers) {
            u.substitute(v, value);
            l.substitute(v, value);
        }
        ns.notes = st.notes;
        ns.notes.push_back(std::string(how));
        return ns;
    };

    if (c.sign() > 0) {
        if (uppers.empty()) {
            divergences.push_back({st, v, "positive exponent, no upper bound"});
            return;
        }
        for (std::size_t i = 0; i < uppers.size(); ++i) {
            std::vector<LinForm> ineqs = rest;
            for (std::size_t j = 0; j < uppers.size(); ++j)
                if (j != i) push_unique(ineqs, LinForm(uppers[i]).add_scaled(uppers[j], Rational(-1)));
            for (const auto& l : lowers)
                push_unique(ineqs, LinForm(l).add_scaled(uppers[i], Rational(-1)));
            out.push_back(substituted_state(uppers[i], std::move(ineqs), "sum to upper bound"));
        }
        return;
    }
    if (c.sign() < 0) {
        if (lowers.empty()) {
            divergences.push_back({st, v, "negative exponent, no lower bound"});
            return;
        }
        for (std::size_t j = 0; j < lowers.size(); ++j) {
            std::vector<LinForm> ineqs = rest;
            for (std::size_t k = 0; k < lowers.size(); ++k)
                if (k != j) push_unique(ineqs, LinForm(lowers[k]).add_scaled(lowers[j], Rational(-1)));
            for (const auto& u : uppers)
                push_unique(ineqs, LinForm(lowers[j]).add_scaled(u, Rational(-1)));
            out.push_back(substituted_state(lowers[j], std::move(ineqs), "sum from lower bound"));
        }
        return;
    }
    // zero exponent: the sum counts lattice points in [max lowers, min uppers]
    if (uppers.empty() || lowers.empty()) {
        divergences.push_back({st, v, "zero exponent, unbounded range"});
        return;
    }
    for (std::size_t i = 0; i < uppers.size(); ++i) {
        for (std::size_t j = 0; j < lowers.size(); ++j) {
            std::vector<LinForm> ineqs = rest;
            for (std::size_t j2 = 0; j2 < uppers.size(); ++j2)
                if (j2 != i) push_unique(ineqs, LinForm(uppers[i]).add_scaled(uppers[j2], Rational(-1)));
            for (std::size_t k = 0; k < lowers.size(); ++k)
                if (k != j) push_unique(ineqs, LinForm(lowers[k]).add_scaled(lowers[j], Rational(-1)));
            push_unique(ineqs, LinForm(lowers[j]).add_scaled(uppers[i], Rational(-1)));
            ElimState ns = substituted_state(uppers[i], std::move(ineqs), "count range extent");
            ns.markers.push_back({uppers[i], lowers[j]});
            out.push_back(std::move(ns));
        }
    }
}

// Fourier-Motzkin projection used only to decide whether a divergent branch's
// region is actually inhabited.
bool region_feasible(std::vector<LinForm> ineqs, std::vector<std::size_t> vars,
                     std::size_t param) {
    const std::size_t cap = 40000;
    for (std::size_t v : vars) {
        std::vector<LinForm> uppers, lowers, rest;
        for (const auto& q : ineqs) {
            Rational a = q.coeff[v];
            if (a.is_zero()) {
                rest.push_back(q);
                continue;
            }
            LinForm bound(q.coeff.size());
            bound.add_scaled(q, Rational(-1) / a);
            bound.coeff[v] = Rational(0);
            (a.sign() > 0 ? uppers : lowers).push_back(std::move(bound));
        }
        for (const auto& l : lowers)
            for (const auto& u : uppers) {
                push_unique(rest, LinForm(l).add_scaled(u, Rational(-1)));
                if (rest.size() > cap) return true; // give up: assume inhabited
            }
        ineqs = std::move(rest);
    }
    std::optional<Rational> lo, hi;
    for (const auto& q : ineqs) {
        Rational a = q.coeff[param];
        if (a.is_zero()) {
            if (q.cst > Rational(0)) return false;
            continue;
        }
        Rational b = -q.cst / a;
        if (a.sign() > 0) {
            if (!hi || b < *hi) hi = b;
        } else {
            if (!lo || b > *lo) lo = b;
        }
    }
    if (lo && hi) return lo->ceil() <= hi->floor();
    return true;
}

std::string join_notes(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += "; ";
        out += v[i];
    }
    return out;
}

} // namespace

ElimResult eliminate_var(const Monomial& summand, const LogRegion& region, const std::string& v) {
    std::set<std::string> names_set = region.variables();
    summand.collect_variables(names_set);
    names_set.insert(v);
    std::vector<std::string> names(names_set.begin(), names_set.end());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

    ElimState st;
    st.summand = form_of_monomial(summand, index);
    for (const auto& q : region.inequalities()) st.ineqs.push_back(form_of_ineq(q, index));

    std::vector<ElimState> finals;
    std::vector<Divergence> divergences;
    eliminate_one(st, index.at(v), finals, divergences);

    ElimResult out;
    if (!divergences.empty()) {
        out.kind = ElimResult::Kind::Divergent;
        out.note = v + ": " + divergences.front().reason;
        return out;
    }
    for (const auto& fs : finals) {
        ElimBranch b;
        b.summand = monomial_of_form(fs.summand, names);
        std::vector<LinIneq> qs;
        for (const auto& f : fs.ineqs) {
            LinIneq q;
            q.bound = -f.cst;
            for (std::size_t i = 0; i < names.size(); ++i)
                if (!f.coeff[i].is_zero()) q.coeffs[names[i]] = f.coeff[i];
            qs.push_back(std::move(q));
        }
        b.region = LogRegion(std::move(qs));
        if (!fs.markers.empty())
            b.log_extent = {{monomial_of_form(fs.markers.back().first, names),
                             monomial_of_form(fs.markers.back().second, names)}};
        b.note = join_notes(fs.notes);
        out.branches.push_back(std::move(b));
    }
    return out;
}

SymbolicOutcome symbolic_growth(const Problem& p, const EngineConfig& cfg) {
    SymbolicOutcome out;

    std::vector<Branch> branches = split(p.summand, p.constraints);
    out.branch_count = branches.size();
    std::vector<Constraint> shared = pure_monomial_subset(p.constraints);

    auto names = p.summation_names();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
    std::size_t param = names.size();
    index[p.param] = param;

    std::vector<std::size_t> order;
    for (const auto& n : p.effective_elimination_order()) {
        auto it = index.find(n);
        if (it == index.end() || it->second == param)
            throw Error("bad elimination order entry: " + n);
        order.push_back(it->second);
    }
    if (order.size() != names.size()) throw Error("elimination order must cover all variables");

    bool have_best = false;
    bool any_transient = false;
    Rational best_exponent;
    int best_logdeg = 0;
    std::string best_witness;
    std::size_t states_seen = 0;

    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
        const Branch& br = branches[bi];
        std::vector<Constraint> all = shared;
        all.insert(all.end(), br.extra_constraints.begin(), br.extra_constraints.end());
        LogRegion region = linearize(all, p.slack);
        if (region.trivially_infeasible()) continue;

        ElimState st;
        st.summand = form_of_monomial(br.summand, index);
        for (const auto& q : region.inequalities()) st.ineqs.push_back(form_of_ineq(q, index));

        std::vector<ElimState> current{std::move(st)};
        std::vector<Divergence> divergences;
        for (std::size_t v : order) {
            std::vector<ElimState> next;
            for (const auto& s : current) {
                eliminate_one(s, v, next, divergences);
                states_seen += next.size();
                if (states_seen > cfg.branch_guard) {
                    out.kind = SymbolicOutcome::Kind::NotEliminable;
                    out.witness = "subbranch budget exhausted";
                    return out;
                }
            }
            // a divergent inner sum infects the whole branch if its region is inhabited
            for (const auto& d : divergences) {
                std::vector<std::size_t> remaining;
                for (std::size_t w : order)
                    if (w != d.var) remaining.push_back(w);
                std::vector<LinForm> rest;
                for (const auto& q : d.state.ineqs)
                    if (q.coeff[d.var].is_zero()) rest.push_back(q);
                if (region_feasible(std::move(rest), remaining, param)) {
                    out.kind = SymbolicOutcome::Kind::DivergentAtFixedParam;
                    out.witness = names[d.var] + ": " + d.reason +
                                  (br.provenance.empty() ? "" : " [" + join_notes(br.provenance) + "]");
                    return out;
                }
            }
            divergences.clear();
            current = std::move(next);
        }

        for (const auto& fs : current) {
            // region now mentions the parameter only
            bool infeasible = false, transient = false;
            for (const auto& q : fs.ineqs) {
                Rational a = q.coeff[param];
                if (a.is_zero()) {
                    if (q.cst > Rational(0)) infeasible = true;
                } else if (a.sign() > 0) {
                    transient = true; // k_N capped above: dies for large N
                }
            }
            if (infeasible) continue;
            if (transient) {
                any_transient = true;
                continue;
            }
            Rational alpha = fs.summand.coeff[param];
            int logdeg = 0;
            for (const auto& [u, l] : fs.markers) {
                LinForm extent = u;
                extent.add_scaled(l, Rational(-1));
                if (extent.coeff[param].sign() > 0) ++logdeg;
            }
            std::string witness = join_notes(br.provenance);
            ++out.live_branch_count;
            if (!have_best || alpha > best_exponent) {
                have_best = true;
                best_exponent = alpha;
                best_logdeg = logdeg;
                best_witness = witness;
            } else if (alpha == best_exponent && logdeg > best_logdeg) {
                best_logdeg = logdeg;
                best_witness = witness;
            }
        }
    }

    if (!have_best) {
        out.kind = SymbolicOutcome::Kind::Empty;
        out.witness = any_transient ? "nonzero only for bounded parameter" : "region empty";
        return out;
    }
    out.kind = SymbolicOutcome::Kind::Growth;
    out.growth.exponent = best_exponent;
    out.growth.log_degree = best_logdeg;
    out.witness = best_witness;
    return out;
}

} // namespace dsum
