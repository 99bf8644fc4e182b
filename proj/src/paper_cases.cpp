#include "dsum/paper_cases.hpp"

#include <algorithm>
#include <map>

namespace dsum {

bool is_admissible(const Triple& t) {
    if (t.n != 2 && t.n != 3) throw Error("is_admissible: n must be 2 or 3");
    Rational half(1, 2);
    if (!(t.s < Rational(0)) || !(t.theta > half)) return false;
    if (t.n == 3) return t.s >= Rational(2) * t.theta - Rational(3, 2);
    if (t.theta == Rational(3, 4)) return t.s > Rational(-1, 2);
    Rational lo = std::max(t.theta - Rational(5, 4), Rational(2) * t.theta - Rational(2));
    return t.s >= lo;
}

bool satisfies_23ts(const Triple& t) {
    if (t.n != 2 && t.n != 3) return false;
    return t.theta > Rational(1, 2) && (t.theta - Rational(1)) / Rational(2) < t.s &&
           t.s < Rational(0);
}

const char* estimate_kind_name(EstimateKind k) {
    switch (k) {
        case EstimateKind::Cucv: return "cucv";
        case EstimateKind::Uv: return "uv";
        case EstimateKind::Cuv: return "cuv";
        case EstimateKind::OmegaCuv: return "omega-cuv";
    }
    return "?";
}

std::optional<EstimateKind> estimate_kind_from_name(const std::string& name) {
    if (name == "cucv") return EstimateKind::Cucv;
    if (name == "uv") return EstimateKind::Uv;
    if (name == "cuv") return EstimateKind::Cuv;
    if (name == "omega-cuv" || name == "omegacuv") return EstimateKind::OmegaCuv;
    return std::nullopt;
}

namespace {

const char* n_role_var(NRole r) {
    switch (r) {
        case NRole::Max: return "Nmax";
        case NRole::Med: return "Nmed";
        case NRole::Min: return "Nmin";
    }
    return "?";
}
const char* l_role_var(LRole r) {
    switch (r) {
        case LRole::Min: return "Lmin";
        case LRole::Med: return "Lmed";
        case LRole::Max: return "Lmax";
    }
    return "?";
}

const char* modulation_name(Modulation m) { return m == Modulation::Low ? "low" : "high"; }

const char* subcase_name(Subcase s) {
    switch (s) {
        case Subcase::PlusPlusPlus: return "+++";
        case Subcase::Separated: return "separated";
        case Subcase::Coherence: return "coherence";
        case Subcase::Generic: return "generic";
    }
    return "?";
}

const char* pattern_name(SizePattern p) {
    switch (p) {
        case SizePattern::Sorted: return "sorted";
        case SizePattern::AllComparable: return "all-comparable";
        case SizePattern::SmallStrict: return "small<<";
        case SizePattern::SmallGtrsim: return "small<~";
    }
    return "?";
}

Monomial var(const std::string& name) { return Monomial::var(name); }
Monomial var_pow(const std::string& name, Rational p) {
    return Monomial::var(name, SymExp(p));
}

SymExp sym_s() { return SymExp::symbol("s"); }
SymExp sym_th() { return SymExp::symbol("th"); }
SymExp sym_eps() { return SymExp::symbol("eps"); }

} // namespace

std::string RoleAssignment::str() const {
    auto nn = [&](int i) { return std::string(n_role_var(n_role[i])).substr(1); };
    auto ll = [&](int i) { return std::string(l_role_var(l_role[i])).substr(1); };
    return "N=(" + nn(0) + "," + nn(1) + "," + nn(2) + ") L=(" + ll(0) + "," + ll(1) + "," +
           ll(2) + ")";
}

std::string EstimateCase::label() const {
    std::string out = std::string(estimate_kind_name(kind)) + " " + modulation_name(modulation) +
                      " " + subcase_name(subcase);
    if (subcase == Subcase::Coherence) out += "(i=" + std::to_string(coherent_index + 1) + ")";
    out += " " + std::string(pattern_name(pattern)) + " " + roles.str();
    return out;
}

Summand weight(EstimateKind kind, const RoleAssignment& roles, const Triple&) {
    // index exponents for <N_i> and L_i
    std::array<SymExp, 3> n_exp, l_exp;
    SymExp th1 = sym_th() - SymExp(Rational(1)); // theta - 1
    switch (kind) {
        case EstimateKind::Cucv:
        case EstimateKind::Uv:
            n_exp = {-sym_s(), -sym_s(), sym_s()};
            l_exp = {-sym_th(), -sym_th(), th1};
            break;
        case EstimateKind::Cuv:
        case EstimateKind::OmegaCuv:
            n_exp = {-sym_s(), sym_s(), -sym_s()};
            l_exp = {-sym_th(), th1, -sym_th()};
            break;
    }
    if (kind == EstimateKind::OmegaCuv) n_exp[1] = sym_s() - SymExp(Rational(2));

    Summand out;
    for (int i = 0; i < 3; ++i)
        out.append(Factor::bracket(var(n_role_var(roles.n_role[i])), n_exp[i]));
    if (kind == EstimateKind::OmegaCuv)
        out.append(Factor::mono(var_pow(n_role_var(roles.n_role[1]), Rational(2))));
    Monomial lpart;
    for (int i = 0; i < 3; ++i)
        lpart = lpart * Monomial::var(l_role_var(roles.l_role[i]), l_exp[i]);
    out.append(Factor::mono(lpart));
    return out;
}

Summand norm_bound(const EstimateCase& c) {
    Rational half(1, 2);
    Rational nm1_2(c.n - 1, 2); // (n-1)/2
    Summand out;
    out.append(Factor::mono(var_pow("Lmin", half) * var_pow("Nmax", -half) *
                            var_pow("Nmin", nm1_2)));
    switch (c.subcase) {
        case Subcase::PlusPlusPlus:
        case Subcase::Separated:
            out.append(Factor::min_of({var("Nmax") * var("Nmin"), var("Lmed")}, SymExp(half)));
            break;
        case Subcase::Coherence:
            out.append(Factor::min_of({var("H"), var("H") * var_pow("Nmin", Rational(-2)) * var("Lmed")},
                                      SymExp(half)));
            break;
        case Subcase::Generic:
            out.append(Factor::min_of({var("H"), var("Lmed")}, SymExp(half)));
            out.append(Factor::min_of({Monomial::one(), var("H") * var_pow("Nmin", Rational(-2))},
                                      SymExp(half) - sym_eps()));
            break;
    }
    return out;
}

Rational epsilon_for(const Triple& t) {
    if (t.n == 2) return Rational(0);
    Rational candidate = (t.theta - Rational(1, 2)) / Rational(2);
    return std::min(Rational(1, 16), candidate);
}

std::vector<Constraint> structural_constraints(const EstimateCase& c) {
    std::vector<Constraint> out;
    auto add = [&](const Monomial& l, Relation r, const Monomial& m) {
        out.push_back(Constraint::make(l, r, m));
    };
    // frequency and modulation shells sorted, largest two frequencies comparable
    add(var("Nmin"), Relation::Le, var("Nmed"));
    add(var("Nmed"), Relation::Le, var("Nmax"));
    add(var("Nmax"), Relation::Sim, var("Nmed"));
    add(var("Nmax"), Relation::Gtrsim, Monomial::one());
    add(var("Lmin"), Relation::Le, var("Lmed"));
    add(var("Lmed"), Relation::Le, var("Lmax"));
    add(var("Lmin"), Relation::Gtrsim, Monomial::one());
    // growth parameter pin
    add(var("Nmax"), Relation::Sim, var("N"));

    if (c.modulation == Modulation::Low) {
        add(var("H"), Relation::Sim, var("Lmax"));
    } else {
        add(var("Lmax"), Relation::Sim, var("Lmed"));
        add(var("H"), Relation::Ll, var("Lmax"));
    }

    bool plus_plus_minus = c.kind != EstimateKind::Cucv;
    if (plus_plus_minus) {
        // H = 2|xi_1 . xi_2| <~ N_1 N_2
        Monomial n1n2 = var(n_role_var(c.roles.n_role[0])) * var(n_role_var(c.roles.n_role[1]));
        add(var("H"), Relation::Lesssim, n1n2);
    }

    switch (c.subcase) {
        case Subcase::PlusPlusPlus:
        case Subcase::Separated:
            add(var("H"), Relation::Sim, var_pow("Nmax", Rational(2)));
            break;
        case Subcase::Coherence:
            add(var("Lmax"), Relation::Gg, var("Lmed"));
            add(var("Lmax"), Relation::Gg, var_pow("Nmin", Rational(2)));
            break;
        case Subcase::Generic:
            break;
    }

    switch (c.pattern) {
        case SizePattern::Sorted:
        case SizePattern::SmallGtrsim:
            break;
        case SizePattern::AllComparable:
            add(var("Nmin"), Relation::Sim, var("Nmax"));
            break;
        case SizePattern::SmallStrict:
            add(var("Nmin"), Relation::Ll, var("Nmed"));
            break;
    }
    return out;
}

namespace {

Problem assemble(const EstimateCase& c, const Triple& t, const SlackConfig& slack) {
    Summand s = weight(c.kind, c.roles, t);
    for (const auto& f : norm_bound(c).factors()) s.append(f);
    std::map<std::string, Rational> bindings{
        {"s", t.s}, {"th", t.theta}, {"eps", epsilon_for(t)}};
    Problem p;
    p.summand = substitute_params(s, bindings);
    p.constraints = structural_constraints(c);
    for (const auto& name : {"Nmax", "Nmed", "Nmin", "H", "Lmax", "Lmed", "Lmin"})
        p.variables.push_back({name, VarRole::Summation});
    p.param = "N";
    p.slack = slack;
    p.elimination_order = {"Lmin", "Lmed", "H", "Lmax", "Nmin", "Nmed", "Nmax"};
    p.name = c.label();
    return p;
}

std::string canonical_key(const Problem& p) {
    std::string key = p.summand.str() + " |";
    std::vector<std::string> cs;
    for (const auto& c : p.constraints) cs.push_back(c.str());
    std::sort(cs.begin(), cs.end());
    for (const auto& s : cs) key += " " + s + ";";
    return key;
}

std::array<std::array<int, 3>, 6> permutations3() {
    return {{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
}

} // namespace

std::vector<CompiledCase> build_problems(EstimateKind kind, const Triple& t,
                                         const SlackConfig& slack) {
    if (t.n != 2 && t.n != 3) throw Error("build_problems: n must be 2 or 3");

    struct SubcasePattern {
        Subcase subcase;
        SizePattern pattern;
    };
    std::vector<SubcasePattern> subcases;
    if (kind == EstimateKind::Cucv) {
        subcases = {{Subcase::PlusPlusPlus, SizePattern::Sorted}};
    } else if (kind == EstimateKind::OmegaCuv) {
        subcases = {{Subcase::Coherence, SizePattern::SmallStrict}};
    } else {
        subcases = {{Subcase::Separated, SizePattern::SmallStrict},
                    {Subcase::Coherence, SizePattern::SmallStrict},
                    {Subcase::Generic, SizePattern::AllComparable},
                    {Subcase::Generic, SizePattern::SmallGtrsim}};
    }

    const std::array<NRole, 3> nroles{NRole::Max, NRole::Med, NRole::Min};
    const std::array<LRole, 3> lroles{LRole::Min, LRole::Med, LRole::Max};

    std::vector<CompiledCase> out;
    std::map<std::string, std::size_t> seen;

    for (auto [subcase, pattern] : subcases) {
        std::vector<Modulation> mods;
        if (subcase == Subcase::Coherence)
            mods = {Modulation::Low}; // needs H ~ L_c ~ L_max
        else
            mods = {Modulation::Low, Modulation::High};

        for (Modulation mod : mods) {
            for (const auto& np : permutations3()) {
                for (const auto& lp : permutations3()) {
                    EstimateCase c;
                    c.kind = kind;
                    c.modulation = mod;
                    c.subcase = subcase;
                    c.pattern = pattern;
                    c.n = t.n;
                    for (int i = 0; i < 3; ++i) {
                        c.roles.n_role[i] = nroles[np[i]];
                        c.roles.l_role[i] = lroles[lp[i]];
                    }
                    if (subcase == Subcase::Separated) {
                        // N1 ~ N2 >> N3
                        if (c.roles.n_role[2] != NRole::Min) continue;
                    }
                    if (subcase == Subcase::Coherence) {
                        // small frequency index i in {1,2} carries H ~ L_i = L_max
                        int ci = -1;
                        for (int i = 0; i < 2; ++i)
                            if (c.roles.n_role[i] == NRole::Min) ci = i;
                        if (ci < 0) continue;
                        if (c.roles.l_role[ci] != LRole::Max) continue;
                        c.coherent_index = ci;
                    }
                    if (subcase == Subcase::Generic && pattern == SizePattern::SmallGtrsim) {
                        // small index in {1,2}; index 3 small belongs to 'separated'
                        if (c.roles.n_role[2] == NRole::Min) continue;
                    }

                    Problem p = assemble(c, t, slack);
                    std::string key = canonical_key(p);
                    auto it = seen.find(key);
                    if (it != seen.end()) {
                        out[it->second].merged_labels.push_back(c.label());
                        continue;
                    }
                    seen[key] = out.size();
                    out.push_back({c, std::move(p), {}});
                }
            }
        }
    }
    return out;
}

EstimateReport verify_estimate(EstimateKind kind, const Triple& t, const EngineConfig& cfg) {
    EstimateReport rep;
    rep.kind = kind;
    rep.t = t;
    rep.reference = (kind == EstimateKind::Cucv || kind == EstimateKind::Uv)
                        ? is_admissible(t)
                        : satisfies_23ts(t);

    bool any_unbounded = false, any_inconclusive = false, any_log = false;
    for (const auto& cc : build_problems(kind, t, SlackConfig{})) {
        CaseVerdict cv;
        cv.label = cc.kase.label();
        cv.verdict = verdict(cc.problem, cfg);
        switch (cv.verdict.classification) {
            case Classification::Unbounded:
                any_unbounded = true;
                rep.failing.push_back(cv.label);
                break;
            case Classification::Inconclusive:
                any_inconclusive = true;
                rep.failing.push_back(cv.label + " (inconclusive)");
                break;
            case Classification::LogDivergent:
                any_log = true;
                rep.failing.push_back(cv.label + " (log)");
                break;
            case Classification::Bounded: break;
        }
        rep.cases.push_back(std::move(cv));
    }
    rep.overall = any_unbounded      ? Classification::Unbounded
                  : any_inconclusive ? Classification::Inconclusive
                  : any_log          ? Classification::LogDivergent
                                     : Classification::Bounded;
    return rep;
}

std::vector<SweepRow> sweep(EstimateKind kind, int n, Rational s_lo, Rational s_hi,
                            Rational s_step, Rational th_lo, Rational th_hi, Rational th_step,
                            const EngineConfig& cfg) {
    if (s_step.sign() <= 0 || th_step.sign() <= 0) throw Error("sweep: steps must be positive");
    std::vector<SweepRow> rows;
    for (Rational th = th_lo; th <= th_hi; th += th_step) {
        for (Rational s = s_lo; s <= s_hi; s += s_step) {
            Triple t{n, s, th};
            EstimateReport rep = verify_estimate(kind, t, cfg);
            SweepRow row;
            row.t = t;
            row.kind = kind;
            row.verdict = rep.overall;
            row.reference = rep.reference;
            row.match = (rep.overall == Classification::Bounded) == rep.reference;
            // strongest growth among the cases, for the CSV exponent column
            bool have = false;
            for (const auto& cv : rep.cases) {
                if (cv.verdict.symbolic) {
                    const auto& sym = *cv.verdict.symbolic;
                    if (sym.kind == SymbolicOutcome::Kind::DivergentAtFixedParam)
                        row.divergent_at_fixed_param = true;
                    if (sym.kind == SymbolicOutcome::Kind::Growth) {
                        if (!have || sym.growth.exponent > *row.exact_exponent) {
                            row.exact_exponent = sym.growth.exponent;
                            row.log_degree = sym.growth.log_degree;
                            have = true;
                        } else if (sym.growth.exponent == *row.exact_exponent) {
                            row.log_degree = std::max(row.log_degree, sym.growth.log_degree);
                        }
                    }
                }
            }
            if (row.exact_exponent) row.exponent = row.exact_exponent->to_double();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "n,s,theta,kind,verdict,exponent,log_degree,reference,match\n";
    for (const auto& r : rows) {
        out += std::to_string(r.t.n) + "," + r.t.s.str() + "," + r.t.theta.str() + "," +
               estimate_kind_name(r.kind) + "," + classification_name(r.verdict) + ",";
        if (r.divergent_at_fixed_param)
            out += "inf";
        else if (r.exact_exponent)
            out += r.exact_exponent->str();
        else
            out += "0";
        out += "," + std::to_string(r.log_degree) + "," + (r.reference ? "true" : "false") + "," +
               (r.match ? "true" : "false") + "\n";
    }
    return out;
}

} // namespace dsum
