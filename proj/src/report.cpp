#include "dsum/report.hpp"

#include <cstdio>

#include "dsum/dsl.hpp"
#include "json.hpp"

namespace dsum {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

namespace {

std::string format_sum(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9e", v);
    return buf;
}

const char* engine_mode_name(EngineMode m) {
    switch (m) {
        case EngineMode::Symbolic: return "symbolic";
        case EngineMode::Numeric: return "numeric";
        case EngineMode::Both: return "both";
    }
    return "?";
}

std::string symbolic_line(const SymbolicOutcome& sym) {
    switch (sym.kind) {
        case SymbolicOutcome::Kind::Growth: {
            std::string s = "exponent " + sym.growth.exponent.str() + ", log-degree " +
                            std::to_string(sym.growth.log_degree);
            if (!sym.witness.empty()) s += "  [" + sym.witness + "]";
            return s;
        }
        case SymbolicOutcome::Kind::DivergentAtFixedParam:
            return "divergent at fixed parameter (" + sym.witness + ")";
        case SymbolicOutcome::Kind::Empty: return "empty region (" + sym.witness + ")";
        case SymbolicOutcome::Kind::NotEliminable: return "not eliminable (" + sym.witness + ")";
    }
    return "?";
}

} // namespace

std::string describe_config(const EngineConfig& cfg, const SlackConfig& slack) {
    return "engine=" + std::string(engine_mode_name(cfg.mode)) + " ladder=" +
           std::to_string(cfg.ladder_lo) + ":" + std::to_string(cfg.ladder_hi) +
           " cutoff=" + std::to_string(cfg.cutoff) + " tol=" + format_double(cfg.tol) +
           " slack-sim=" + std::to_string(slack.c_sim) +
           " slack-lesssim=" + std::to_string(slack.c_lesssim) +
           " gap-ll=" + std::to_string(slack.gap_ll);
}

std::string render_report(const Problem& p, const GrowthVerdict& v, const EngineConfig& cfg,
                          const std::vector<std::string>& stage_history) {
    std::string out;
    out += std::string(kToolVersion) + "\n";
    out += "config: " + describe_config(cfg, p.slack) + "\n";
    out += "problem:\n";
    for (const auto& line : {print_problem(p)}) {
        std::istringstream in(line);
        std::string l;
        while (std::getline(in, l)) out += "  " + l + "\n";
    }
    if (!stage_history.empty()) {
        out += "stages:\n";
        for (std::size_t i = 0; i < stage_history.size(); ++i)
            out += "  " + std::to_string(i + 1) + ". " + stage_history[i] + "\n";
    }
    if (v.symbolic) {
        out += "branches: " + std::to_string(v.symbolic->branch_count) +
               " (live " + std::to_string(v.symbolic->live_branch_count) + ")\n";
        out += "symbolic: " + symbolic_line(*v.symbolic) + "\n";
    }
    if (v.ladder) {
        const LadderResult& lr = *v.ladder;
        if (!lr.points.empty()) {
            out += "ladder (kN, K, sum, log2):\n";
            for (const auto& pt : lr.points)
                out += "  " + std::to_string(pt.kn) + "  " + std::to_string(pt.k_used) + "  " +
                       format_sum(pt.sum) + "  " + format_double(pt.log2_sum) + "\n";
            out += "fitted exponent: " + format_double(lr.fitted_exponent) + "  log-degree: " +
                   std::to_string(lr.log_degree_estimate) + "  fit quality: " +
                   format_double(lr.fit_quality) + "\n";
        }
        if (lr.divergent || lr.inconclusive) out += "numeric: " + lr.note + "\n";
    }
    for (const auto& n : v.notes) out += "note: " + n + "\n";
    out += "exponent: " + format_double(v.exponent) + "\n";
    out += "classification: " + std::string(classification_name(v.classification)) + "\n";
    return out;
}

namespace {

nlohmann::ordered_json verdict_json(const Problem& p, const GrowthVerdict& v) {
    nlohmann::ordered_json j;
    j["problem"] = print_problem(p);
    j["classification"] = classification_name(v.classification);
    j["exponent"] = v.exponent;
    j["log_degree"] = v.log_degree;
    if (v.symbolic) {
        nlohmann::ordered_json s;
        const auto& sym = *v.symbolic;
        switch (sym.kind) {
            case SymbolicOutcome::Kind::Growth:
                s["kind"] = "growth";
                s["exponent"] = sym.growth.exponent.str();
                s["log_degree"] = sym.growth.log_degree;
                break;
            case SymbolicOutcome::Kind::DivergentAtFixedParam: s["kind"] = "divergent"; break;
            case SymbolicOutcome::Kind::Empty: s["kind"] = "empty"; break;
            case SymbolicOutcome::Kind::NotEliminable: s["kind"] = "not-eliminable"; break;
        }
        s["witness"] = sym.witness;
        s["branches"] = sym.branch_count;
        s["live_branches"] = sym.live_branch_count;
        j["symbolic"] = s;
    }
    if (v.ladder) {
        nlohmann::ordered_json l;
        l["divergent"] = v.ladder->divergent;
        l["inconclusive"] = v.ladder->inconclusive;
        l["fitted_exponent"] = v.ladder->fitted_exponent;
        l["log_degree_estimate"] = v.ladder->log_degree_estimate;
        l["fit_quality"] = v.ladder->fit_quality;
        l["note"] = v.ladder->note;
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& pt : v.ladder->points) {
            nlohmann::ordered_json q;
            q["kn"] = pt.kn;
            q["k_used"] = pt.k_used;
            q["sum"] = pt.sum;
            q["log2_sum"] = pt.log2_sum;
            pts.push_back(q);
        }
        l["points"] = pts;
        j["ladder"] = l;
    }
    j["notes"] = v.notes;
    return j;
}

} // namespace

std::string render_json(const Problem& p, const GrowthVerdict& v, const EngineConfig& cfg,
                        const std::vector<std::string>& stage_history) {
    nlohmann::ordered_json j;
    j["tool"] = kToolVersion;
    j["config"] = describe_config(cfg, p.slack);
    j["verdict"] = verdict_json(p, v);
    if (!stage_history.empty()) j["stages"] = stage_history;
    return j.dump(2) + "\n";
}

std::string render_estimate_report(const EstimateReport& rep, const EngineConfig& cfg) {
    std::string out;
    out += std::string(kToolVersion) + "\n";
    out += "estimate: " + std::string(estimate_kind_name(rep.kind)) + " at " + rep.t.str() + "\n";
    out += "config: " + describe_config(cfg, SlackConfig{}) + "\n";
    out += "cases:\n";
    for (const auto& cv : rep.cases) {
        std::string line = "  " + std::string(classification_name(cv.verdict.classification));
        if (cv.verdict.symbolic && cv.verdict.symbolic->kind == SymbolicOutcome::Kind::Growth)
            line += " (exponent " + cv.verdict.symbolic->growth.exponent.str() + ", log " +
                    std::to_string(cv.verdict.symbolic->growth.log_degree) + ")";
        line += "  " + cv.label;
        out += line + "\n";
    }
    const char* refname = (rep.kind == EstimateKind::Cucv || rep.kind == EstimateKind::Uv)
                              ? "admissible"
                              : "(23ts)";
    out += "reference " + std::string(refname) + ": " + (rep.reference ? "true" : "false") + "\n";
    out += "overall: " + std::string(classification_name(rep.overall)) + "\n";
    bool match = (rep.overall == Classification::Bounded) == rep.reference;
    out += "match: " + std::string(match ? "true" : "false") + "\n";
    return out;
}

std::string render_estimate_json(const EstimateReport& rep, const EngineConfig& cfg) {
    nlohmann::ordered_json j;
    j["tool"] = kToolVersion;
    j["kind"] = estimate_kind_name(rep.kind);
    j["n"] = rep.t.n;
    j["s"] = rep.t.s.str();
    j["theta"] = rep.t.theta.str();
    j["config"] = describe_config(cfg, SlackConfig{});
    nlohmann::ordered_json cases = nlohmann::ordered_json::array();
    for (const auto& cv : rep.cases) {
        nlohmann::ordered_json c;
        c["label"] = cv.label;
        c["classification"] = classification_name(cv.verdict.classification);
        if (cv.verdict.symbolic && cv.verdict.symbolic->kind == SymbolicOutcome::Kind::Growth) {
            c["exponent"] = cv.verdict.symbolic->growth.exponent.str();
            c["log_degree"] = cv.verdict.symbolic->growth.log_degree;
        }
        cases.push_back(c);
    }
    j["cases"] = cases;
    j["reference"] = rep.reference;
    j["overall"] = classification_name(rep.overall);
    j["match"] = (rep.overall == Classification::Bounded) == rep.reference;
    j["failing"] = rep.failing;
    return j.dump(2) + "\n";
}

} // namespace dsum
