#include "dsum/engine.hpp"

#include <algorithm>
#include <cmath>

namespace dsum {

namespace {

// Summand compiled over the iteration order for fast leaf evaluation.
struct CompiledFactor {
    enum class Kind { Mono, Bracket, MinMax } kind = Kind::Mono;
    // affine log2 forms: value = cst + sum coeff[i] * k_i  (param last)
    struct Form {
        std::vector<long double> coeff;
        long double cst = 0.0L;
        long double at(const std::vector<std::int64_t>& k) const {
            long double e = cst;
            for (std::size_t i = 0; i < coeff.size(); ++i)
                if (coeff[i] != 0.0L) e += coeff[i] * (long double)k[i];
            return e;
        }
    };
    Form form;               // mono/bracket argument
    std::vector<Form> args;  // minmax
    long double power = 0.0L;
    bool is_min = true;
};

struct CompiledIneq {
    // sum coeff[i]*k_i <= bound, integer-scaled for exact arithmetic
    std::vector<std::int64_t> coeff;
    std::int64_t bound = 0;
    std::size_t level = 0; // last summation-variable index with nonzero coeff
    bool param_only = false;
};

// exact rational affine form for leaf filters
struct RationalForm {
    std::vector<Rational> coeff;
    Rational cst;
    Rational at(const std::vector<std::int64_t>& k) const {
        Rational e = cst;
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (!coeff[i].is_zero()) e += coeff[i] * Rational(k[i]);
        return e;
    }
};

// min/max-bearing constraints cannot be turned into half-spaces; they are
// checked exactly at each lattice point instead
struct CompiledFilter {
    struct Side {
        bool is_min = true;
        std::vector<RationalForm> args; // singleton for plain monomials
        Rational at(const std::vector<std::int64_t>& k) const {
            Rational best = args.front().at(k);
            for (std::size_t i = 1; i < args.size(); ++i) {
                Rational e = args[i].at(k);
                if (is_min ? e < best : e > best) best = e;
            }
            return best;
        }
    };
    Side lhs, rhs;
    Relation rel = Relation::Le;

    bool passes(const std::vector<std::int64_t>& k, const SlackConfig& slack) const {
        Rational l = lhs.at(k), r = rhs.at(k);
        switch (rel) {
            case Relation::Lesssim: return l - r <= Rational(slack.c_lesssim);
            case Relation::Gtrsim: return r - l <= Rational(slack.c_lesssim);
            case Relation::Sim:
                return l - r <= Rational(slack.c_sim) && r - l <= Rational(slack.c_sim);
            case Relation::Ll: return l - r <= Rational(-slack.gap_ll);
            case Relation::Gg: return r - l <= Rational(-slack.gap_ll);
            case Relation::Le: return l <= r;
            case Relation::Ge: return r <= l;
        }
        return false;
    }
};

struct Compiled {
    std::vector<std::string> names; // iteration order, param appended last
    std::size_t nvars = 0;          // summation variables
    std::vector<CompiledFactor> factors;
    std::vector<CompiledIneq> ineqs;
    std::vector<CompiledFilter> filters;
    SlackConfig slack;
};

CompiledFactor::Form compile_form(const Monomial& m, const std::map<std::string, std::size_t>& index,
                                  std::size_t n) {
    CompiledFactor::Form f;
    f.coeff.assign(n, 0.0L);
    f.cst = (long double)m.coeff_log2().value().to_double();
    for (const auto& [name, p] : m.powers()) f.coeff[index.at(name)] = (long double)p.value().to_double();
    return f;
}

Compiled compile(const Problem& p) {
    Compiled c;
    c.names = p.summation_names();
    c.nvars = c.names.size();
    c.names.push_back(p.param);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < c.names.size(); ++i) index[c.names[i]] = i;

    for (const auto& f : p.summand.factors()) {
        CompiledFactor cf;
        if (const auto* m = std::get_if<MonoFactor>(&f.node)) {
            cf.kind = CompiledFactor::Kind::Mono;
            cf.form = compile_form(m->mono, index, c.names.size());
            cf.power = 1.0L;
        } else if (const auto* b = std::get_if<BracketFactor>(&f.node)) {
            cf.kind = CompiledFactor::Kind::Bracket;
            cf.form = compile_form(b->arg, index, c.names.size());
            cf.power = (long double)b->power.value().to_double();
        } else {
            const auto& mm = std::get<MinMaxFactor>(f.node);
            cf.kind = CompiledFactor::Kind::MinMax;
            cf.is_min = mm.is_min;
            for (const auto& a : mm.args) cf.args.push_back(compile_form(a, index, c.names.size()));
            cf.power = (long double)mm.power.value().to_double();
        }
        c.factors.push_back(std::move(cf));
    }

    c.slack = p.slack;
    auto rational_form = [&](const Monomial& m) {
        RationalForm f;
        f.coeff.assign(c.names.size(), Rational(0));
        f.cst = m.coeff_log2().value();
        for (const auto& [name, pw] : m.powers()) f.coeff[index.at(name)] = pw.value();
        return f;
    };
    std::vector<Constraint> pure;
    for (const auto& q : p.constraints) {
        if (q.is_pure_monomial()) {
            pure.push_back(q);
            continue;
        }
        CompiledFilter cf;
        cf.rel = q.rel;
        auto compile_side = [&](const ConstraintTerm& t) {
            CompiledFilter::Side s;
            if (t.is_mono()) {
                s.args.push_back(rational_form(t.as_mono()));
            } else {
                const auto& mm = std::get<MinMaxFactor>(t.node);
                s.is_min = mm.is_min;
                for (const auto& a : mm.args) s.args.push_back(rational_form(a));
            }
            return s;
        };
        cf.lhs = compile_side(q.lhs);
        cf.rhs = compile_side(q.rhs);
        c.filters.push_back(std::move(cf));
    }
    LogRegion region = linearize(pure, p.slack);
    for (const auto& q : region.inequalities()) {
        std::int64_t den = 1;
        for (const auto& [name, r] : q.coeffs) den = den / std::gcd(den, r.den()) * r.den();
        den = den / std::gcd(den, q.bound.den()) * q.bound.den();
        CompiledIneq ci;
        ci.coeff.assign(c.names.size(), 0);
        for (const auto& [name, r] : q.coeffs)
            ci.coeff[index.at(name)] = r.num() * (den / r.den());
        ci.bound = q.bound.num() * (den / q.bound.den());
        ci.param_only = true;
        ci.level = 0;
        for (std::size_t i = 0; i < c.nvars; ++i)
            if (ci.coeff[i] != 0) {
                ci.level = i;
                ci.param_only = false;
            }
        c.ineqs.push_back(std::move(ci));
    }
    return c;
}

long double leaf_value(const Compiled& c, const std::vector<std::int64_t>& k) {
    long double total = 0.0L;
    for (const auto& f : c.factors) {
        switch (f.kind) {
            case CompiledFactor::Kind::Mono: total += f.form.at(k); break;
            case CompiledFactor::Kind::Bracket:
                total += f.power * 0.5L * log2_one_plus_exp2(2.0L * f.form.at(k));
                break;
            case CompiledFactor::Kind::MinMax: {
                long double best = f.args.front().at(k);
                for (std::size_t i = 1; i < f.args.size(); ++i) {
                    long double e = f.args[i].at(k);
                    if (f.is_min ? e < best : e > best) best = e;
                }
                total += f.power * best;
                break;
            }
        }
    }
    return std::exp2l(total);
}

struct Walk {
    const Compiled& c;
    int K;
    std::uint64_t budget;
    std::vector<std::int64_t> k;
    std::vector<std::vector<const CompiledIneq*>> clippers; // per level
    TruncatedSum result;

    Walk(const Compiled& c_, int kN, int K_, std::uint64_t budget_)
        : c(c_), K(K_), budget(budget_), clippers(c_.nvars) {
        k.assign(c.names.size(), 0);
        k.back() = kN;
        for (const auto& q : c.ineqs)
            if (!q.param_only) clippers[q.level].push_back(&q);
    }

    bool param_feasible() const {
        for (const auto& q : c.ineqs)
            if (q.param_only && q.coeff.back() * k.back() > q.bound) return false;
        return true;
    }

    // descend level by level; each clipper decides the range of its level's
    // variable exactly once all earlier variables are fixed
    bool descend(std::size_t level) {
        if (level == c.nvars) {
            for (const auto& f : c.filters)
                if (!f.passes(k, c.slack)) return true;
            ++result.terms;
            result.value += leaf_value(c, k);
            return true;
        }
        std::int64_t lo = -K, hi = K;
        for (const CompiledIneq* q : clippers[level]) {
            __int128 rest = (__int128)q->coeff.back() * k.back();
            for (std::size_t i = 0; i < level; ++i)
                if (q->coeff[i] != 0) rest += (__int128)q->coeff[i] * k[i];
            __int128 room = (__int128)q->bound - rest;
            std::int64_t a = q->coeff[level];
            // a*k_level <= room
            if (a > 0) {
                __int128 b = room >= 0 ? room / a : -((-room + a - 1) / a);
                if (b < hi) hi = (std::int64_t)std::max<__int128>(b, -K - 1);
            } else {
                __int128 b = room >= 0 ? -(room / (-a)) : ((-room) + (-a) - 1) / (-a);
                if (b > lo) lo = (std::int64_t)std::min<__int128>(b, K + 1);
            }
        }
        for (std::int64_t v = lo; v <= hi; ++v) {
            if (++result.nodes > budget) {
                result.complete = false;
                return false;
            }
            k[level] = v;
            if (!descend(level + 1)) return false;
        }
        return true;
    }
};

} // namespace

TruncatedSum truncated_sum_guarded(const Problem& p, int kN, int K, std::uint64_t node_budget) {
    Compiled c = compile(p);
    Walk w(c, kN, K, node_budget);
    if (!w.param_feasible()) return w.result; // empty: 0
    w.descend(0);
    return w.result;
}

double truncated_sum(const Problem& p, int kN, int K) {
    TruncatedSum r = truncated_sum_guarded(p, kN, K, EngineConfig{}.cost_guard);
    if (!r.complete)
        throw Error("truncated_sum: lattice walk exceeded the cost guard (" +
                    std::to_string(r.nodes) + " nodes)");
    return (double)r.value;
}

bool cutoff_converged(const Problem& p, int kN, const std::vector<int>& K_ladder,
                      std::uint64_t node_budget) {
    std::vector<long double> sums;
    for (int K : K_ladder) {
        TruncatedSum r = truncated_sum_guarded(p, kN, K, node_budget);
        if (!r.complete) break;
        sums.push_back(r.value);
    }
    if (sums.size() < 2) return false;
    long double prev = sums[sums.size() - 2], last = sums.back();
    if (last == 0.0L) return prev == 0.0L;
    return (last - prev) < 0.01L * last;
}

namespace {

// per-kN outcome of the adaptive truncation ladder
struct PointOutcome {
    enum class Kind { Converged, Divergent, Inconclusive } kind = Kind::Inconclusive;
    long double sum = 0.0L;
    int k_used = 0;
    std::string note;
};

PointOutcome climb(const Problem& p, int kN, const EngineConfig& cfg) {
    PointOutcome out;
    std::vector<std::pair<int, TruncatedSum>> done;
    int quad_streak = 0;
    for (int K : cfg.k_ladder()) {
        // predict node count from the last two runs; skip hopeless boxes
        if (done.size() >= 2) {
            double n1 = (double)done[done.size() - 2].second.nodes;
            double n2 = (double)done.back().second.nodes;
            if (n1 > 0 && n2 > n1) {
                double growth = n2 / n1;
                double span = (double)(K - done.back().first) /
                              (double)(done.back().first - done[done.size() - 2].first);
                double predicted = n2 * std::pow(growth, span);
                if (predicted > 1.2 * (double)cfg.cost_guard) break;
            }
        }
        TruncatedSum r = truncated_sum_guarded(p, kN, K, cfg.cost_guard);
        if (!r.complete) break;
        if (!done.empty() && done.back().second.value > 0.0L &&
            r.value >= 4.0L * done.back().second.value)
            ++quad_streak;
        else
            quad_streak = 0;
        done.push_back({K, r});
        if (quad_streak >= 2) {
            // persistent geometric growth in the cutoff box
            out.kind = PointOutcome::Kind::Divergent;
            out.note = "sum keeps quadrupling up to K=" + std::to_string(K);
            return out;
        }
    }
    if (done.size() < 2) {
        out.note = "cost guard left fewer than two usable truncations";
        return out;
    }
    long double prev = done[done.size() - 2].second.value;
    long double last = done.back().second.value;
    bool settled = last == 0.0L ? prev == 0.0L : (last - prev) < 0.01L * last;
    if (settled) {
        out.kind = PointOutcome::Kind::Converged;
        out.sum = last;
        out.k_used = done.back().first;
        return out;
    }
    if (last >= 2.0L * prev || done.back().first >= cfg.cutoff) {
        out.kind = PointOutcome::Kind::Divergent;
        out.note = "no convergence by K=" + std::to_string(done.back().first);
        return out;
    }
    out.note = "cutoff ladder truncated by cost guard before convergence";
    return out;
}

struct Fit {
    double slope = 0.0, sse = 0.0, r2 = 1.0;
    double log_coeff = 0.0;
};

Fit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    Fit f;
    if (det == 0) return f;
    f.slope = (n * sxy - sx * sy) / det;
    double icpt = (sy - f.slope * sx) / n;
    double ybar = sy / n, sst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (icpt + f.slope * x[i]);
        f.sse += e * e;
        sst += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = sst < 1e-18 ? 1.0 : std::max(0.0, 1.0 - f.sse / sst);
    return f;
}

// y = a + b x + c log2(x), solved by 3x3 normal equations
Fit fit_with_log(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    double m[3][4] = {};
    for (std::size_t i = 0; i < n; ++i) {
        double row[3] = {1.0, x[i], std::log2(x[i])};
        for (int r = 0; r < 3; ++r) {
            for (int c2 = 0; c2 < 3; ++c2) m[r][c2] += row[r] * row[c2];
            m[r][3] += row[r] * y[i];
        }
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        if (std::fabs(m[col][col]) < 1e-12) return {};
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (int c2 = col; c2 < 4; ++c2) m[r][c2] -= f * m[col][c2];
        }
    }
    double a = m[0][3] / m[0][0], b = m[1][3] / m[1][1], c = m[2][3] / m[2][2];
    Fit f;
    f.slope = b;
    f.log_coeff = c;
    double ybar = 0, sst = 0;
    for (std::size_t i = 0; i < n; ++i) ybar += y[i] / n;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (a + b * x[i] + c * std::log2(x[i]));
        f.sse += e * e;
        sst += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = sst < 1e-18 ? 1.0 : std::max(0.0, 1.0 - f.sse / sst);
    return f;
}

} // namespace

LadderResult growth_estimate(const Problem& p, const std::vector<int>& kn_ladder,
                             const EngineConfig& cfg) {
    LadderResult out;
    for (int kn : kn_ladder) {
        PointOutcome po = climb(p, kn, cfg);
        if (po.kind == PointOutcome::Kind::Divergent) {
            out.divergent = true;
            out.note = "divergent at fixed parameter (kN=" + std::to_string(kn) + "): " + po.note;
            return out;
        }
        if (po.kind == PointOutcome::Kind::Inconclusive) {
            out.inconclusive = true;
            out.note = "kN=" + std::to_string(kn) + ": " + po.note;
            return out;
        }
        LadderPoint pt;
        pt.kn = kn;
        pt.sum = (double)po.sum;
        pt.k_used = po.k_used;
        pt.log2_sum = po.sum > 0.0L ? (double)std::log2l(po.sum) : 0.0;
        out.points.push_back(pt);
    }

    std::vector<double> x, y;
    for (const auto& pt : out.points)
        if (pt.sum > 0.0) {
            x.push_back(pt.kn);
            y.push_back(pt.log2_sum);
        }
    if (x.empty()) {
        out.fitted_exponent = 0.0;
        out.fit_quality = 1.0;
        out.note = "empty region: all truncated sums are 0";
        return out;
    }
    if (x.size() < 3) {
        out.inconclusive = true;
        out.note = "fewer than 3 nonzero ladder points";
        return out;
    }
    Fit lin = fit_linear(x, y);
    Fit logf = fit_with_log(x, y);
    bool log_term = lin.sse > 1e-12 && lin.sse > 10.0 * logf.sse;
    out.log_degree_estimate = log_term ? 1 : 0;
    out.fitted_exponent = log_term ? logf.slope : lin.slope;
    out.fit_quality = log_term ? logf.r2 : lin.r2;
    return out;
}

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Bounded: return "Bounded";
        case Classification::Unbounded: return "Unbounded";
        case Classification::LogDivergent: return "LogDivergent";
        case Classification::Inconclusive: return "Inconclusive";
    }
    return "?";
}

int classification_exit_code(Classification c) {
    switch (c) {
        case Classification::Bounded: return 0;
        case Classification::Unbounded: return 1;
        case Classification::LogDivergent: return 2;
        case Classification::Inconclusive: return 3;
    }
    return 3;
}

Classification classify_exponent(double exponent, int log_degree, double tol) {
    if (exponent > tol) return Classification::Unbounded;
    if (log_degree >= 1 && exponent >= -tol) return Classification::LogDivergent;
    return Classification::Bounded;
}

GrowthVerdict verdict(const Problem& p, const EngineConfig& cfg) {
    GrowthVerdict v;
    for (const auto& n : p.validate()) v.notes.push_back(n);

    bool want_symbolic = cfg.mode != EngineMode::Numeric;
    bool want_numeric = cfg.mode != EngineMode::Symbolic;

    if (want_symbolic) {
        SymbolicOutcome sym = symbolic_growth(p, cfg);
        v.symbolic = sym;
        switch (sym.kind) {
            case SymbolicOutcome::Kind::DivergentAtFixedParam: {
                v.classification = Classification::Unbounded;
                v.notes.push_back("divergent at fixed parameter: " + sym.witness);
                if (want_numeric) {
                    // numeric confirmation at the bottom of the ladder
                    LadderResult lr = growth_estimate(p, {cfg.ladder_lo}, cfg);
                    v.ladder = lr;
                    if (!lr.divergent)
                        v.notes.push_back("numeric engine did not confirm divergence at kN=" +
                                          std::to_string(cfg.ladder_lo));
                }
                return v;
            }
            case SymbolicOutcome::Kind::Empty: {
                v.classification = Classification::Bounded;
                v.exponent = 0.0;
                v.notes.push_back("empty region: " + sym.witness);
                return v;
            }
            case SymbolicOutcome::Kind::Growth: {
                // the symbolic exponent is exact: classify by sign, no band
                double alpha = sym.growth.exponent.to_double();
                if (sym.growth.exponent > Rational(0))
                    v.classification = Classification::Unbounded;
                else if (sym.growth.exponent == Rational(0) && sym.growth.log_degree >= 1)
                    v.classification = Classification::LogDivergent;
                else
                    v.classification = Classification::Bounded;
                v.exponent = alpha;
                v.log_degree = sym.growth.log_degree;
                if (want_numeric) {
                    LadderResult lr = growth_estimate(p, cfg.kn_ladder(), cfg);
                    v.ladder = lr;
                    if (lr.divergent) {
                        v.notes.push_back("numeric engine reports divergence; symbolic growth kept");
                    } else if (!lr.inconclusive) {
                        v.exponent = lr.fitted_exponent;
                        if (std::fabs(lr.fitted_exponent - alpha) > 0.1)
                            v.notes.push_back("symbolic/numeric exponent disagreement: " +
                                              sym.growth.exponent.str() + " vs fitted");
                    }
                }
                return v;
            }
            case SymbolicOutcome::Kind::NotEliminable:
                v.notes.push_back("symbolic engine: " + sym.witness);
                if (!want_numeric) {
                    v.classification = Classification::Inconclusive;
                    return v;
                }
                break; // fall through to numeric
        }
    }

    LadderResult lr = growth_estimate(p, cfg.kn_ladder(), cfg);
    v.ladder = lr;
    if (lr.divergent) {
        v.classification = Classification::Unbounded;
        v.notes.push_back(lr.note);
        return v;
    }
    if (lr.inconclusive) {
        v.classification = Classification::Inconclusive;
        v.notes.push_back(lr.note);
        return v;
    }
    if (lr.fit_quality < 0.9 && !lr.points.empty() && lr.points.front().sum > 0.0) {
        v.classification = Classification::Inconclusive;
        v.notes.push_back("fit quality below 0.9");
        v.exponent = lr.fitted_exponent;
        return v;
    }
    v.exponent = lr.fitted_exponent;
    v.log_degree = lr.log_degree_estimate;
    v.classification = classify_exponent(lr.fitted_exponent, lr.log_degree_estimate, cfg.tol);
    if (!lr.note.empty()) v.notes.push_back(lr.note);
    return v;
}

} // namespace dsum
