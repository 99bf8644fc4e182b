#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dsum/dsl.hpp"
#include "dsum/report.hpp"

namespace {

constexpr int kUsageError = 64;
constexpr int kParseError = 65;

struct CommonFlags {
    std::string ladder = "4:12";
    int cutoff = 64;
    std::int64_t slack_sim = 1;
    std::int64_t slack_lesssim = 2;
    std::int64_t gap_ll = 3;
    double tol = 0.05;
    std::string engine = "both";
    std::string json_path;

    void attach(CLI::App* app) {
        app->add_option("--ladder", ladder, "kN ladder as lo:hi (default 4:12)");
        app->add_option("--cutoff", cutoff, "truncation box half-width K (default 64)");
        app->add_option("--slack-sim", slack_sim, "log2 slack for ~ (default 1)");
        app->add_option("--slack-lesssim", slack_lesssim, "log2 slack for <~ (default 2)");
        app->add_option("--gap-ll", gap_ll, "log2 gap for << (default 3)");
        app->add_option("--tol", tol, "growth-exponent tolerance (default 0.05)");
        app->add_option("--engine", engine, "symbolic | numeric | both (default both)");
        app->add_option("--json", json_path, "also write a JSON report to this path");
    }

    dsum::EngineConfig config() const {
        dsum::EngineConfig cfg;
        auto colon = ladder.find(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--ladder expects lo:hi");
        cfg.ladder_lo = std::stoi(ladder.substr(0, colon));
        cfg.ladder_hi = std::stoi(ladder.substr(colon + 1));
        if (cfg.ladder_lo < 1 || cfg.ladder_hi - cfg.ladder_lo + 1 < 5)
            throw CLI::ValidationError("ladder needs at least 5 points");
        cfg.cutoff = cutoff;
        cfg.tol = tol;
        if (engine == "symbolic")
            cfg.mode = dsum::EngineMode::Symbolic;
        else if (engine == "numeric")
            cfg.mode = dsum::EngineMode::Numeric;
        else if (engine == "both")
            cfg.mode = dsum::EngineMode::Both;
        else
            throw CLI::ValidationError("--engine must be symbolic, numeric, or both");
        return cfg;
    }

    dsum::SlackConfig slack() const {
        dsum::SlackConfig s;
        s.c_sim = slack_sim;
        s.c_lesssim = slack_lesssim;
        s.gap_ll = gap_ll;
        return s;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dsum::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dsum::Error("cannot write " + path);
    out << content;
}

dsum::Problem load_problem(const std::string& path, const CommonFlags& flags) {
    dsum::Problem p = dsum::parse_problem(read_file(path));
    p.slack = flags.slack();
    if (p.name.empty()) p.name = path;
    return p;
}

int run_verify(const std::string& path, const CommonFlags& flags) {
    dsum::EngineConfig cfg = flags.config();
    dsum::Problem p = load_problem(path, flags);
    dsum::GrowthVerdict v = dsum::verdict(p, cfg);
    std::cout << dsum::render_report(p, v, cfg);
    if (!flags.json_path.empty()) write_file(flags.json_path, dsum::render_json(p, v, cfg));
    return dsum::classification_exit_code(v.classification);
}

struct ReplSession {
    dsum::Problem problem;
    dsum::EngineConfig cfg;
    std::vector<std::string> history; // one line per completed `run`
    int last_exit = 0;

    void show(std::ostream& out) const { out << dsum::print_problem(problem); }

    void run(std::ostream& out) {
        dsum::GrowthVerdict v = dsum::verdict(problem, cfg);
        out << dsum::render_report(problem, v, cfg, history);
        std::string stage = "constraints=" + std::to_string(problem.constraints.size()) +
                            " -> " + dsum::classification_name(v.classification) +
                            " (exponent " + dsum::format_double(v.exponent) + ")";
        history.push_back(stage);
        last_exit = dsum::classification_exit_code(v.classification);
    }

    bool handle(const std::string& line, std::ostream& out) {
        std::istringstream in(line);
        std::string cmd;
        in >> cmd;
        if (cmd.empty()) return true;
        try {
            if (cmd == "quit" || cmd == "exit") return false;
            if (cmd == "run") {
                run(out);
            } else if (cmd == "show") {
                show(out);
            } else if (cmd == "history") {
                for (std::size_t i = 0; i < history.size(); ++i)
                    out << (i + 1) << ". " << history[i] << "\n";
                if (history.empty()) out << "(no runs yet)\n";
            } else if (cmd == "add") {
                std::string kw;
                in >> kw;
                if (kw != "where") {
                    out << "error: expected `add where <constraint>`\n";
                    return true;
                }
                std::string rest;
                std::getline(in, rest);
                dsum::Constraint c = dsum::parse_constraint(rest);
                dsum::Problem trial = problem;
                trial.constraints.push_back(c);
                trial.validate(); // rejects undeclared variables, state unchanged on throw
                problem = std::move(trial);
                out << "added: where " << c.str() << "\n";
            } else if (cmd == "drop") {
                std::size_t k = 0;
                if (!(in >> k) || k < 1 || k > problem.constraints.size()) {
                    out << "error: drop expects a constraint index in 1.."
                        << problem.constraints.size() << "\n";
                    return true;
                }
                dsum::Constraint c = problem.constraints[k - 1];
                problem.constraints.erase(problem.constraints.begin() + (k - 1));
                out << "dropped: where " << c.str() << "\n";
            } else if (cmd == "save") {
                std::string path;
                in >> path;
                if (path.empty()) {
                    out << "error: save expects a path\n";
                    return true;
                }
                write_file(path, dsum::print_problem(problem));
                out << "saved " << path << "\n";
            } else if (cmd == "help") {
                out << "commands: run | add where <constraint> | drop <k> | show | history | "
                       "save <path> | quit\n";
            } else {
                out << "error: unknown command '" << cmd << "' (try help)\n";
            }
        } catch (const dsum::Error& e) {
            out << "error: " << e.what() << "\n";
        }
        return true;
    }
};

int run_repl(const std::string& path, const CommonFlags& flags) {
    ReplSession session;
    session.cfg = flags.config();
    session.problem = load_problem(path, flags);
    std::cout << dsum::kToolVersion << " repl; loaded " << path << "\n";
    std::string line;
    while (std::cout << "dsum> " << std::flush, std::getline(std::cin, line))
        if (!session.handle(line, std::cout)) break;
    std::cout << "\n";
    return session.last_exit;
}

int run_paper(const std::string& kind_name, int n, const std::string& s_text,
              const std::string& th_text, const CommonFlags& flags) {
    auto kind = dsum::estimate_kind_from_name(kind_name);
    if (!kind) throw CLI::ValidationError("--kind must be cucv, uv, cuv, or omega-cuv");
    if (n != 2 && n != 3) throw CLI::ValidationError("--n must be 2 or 3");
    dsum::Triple t{n, dsum::Rational::parse(s_text), dsum::Rational::parse(th_text)};
    dsum::EngineConfig cfg = flags.config();
    dsum::EstimateReport rep = dsum::verify_estimate(*kind, t, cfg);
    std::cout << dsum::render_estimate_report(rep, cfg);
    if (!flags.json_path.empty())
        write_file(flags.json_path, dsum::render_estimate_json(rep, cfg));
    return dsum::classification_exit_code(rep.overall);
}

int run_sweep(const std::string& kind_name, int n, const std::string& s_range,
              const std::string& th_range, const std::string& csv_path,
              const CommonFlags& flags) {
    auto kind = dsum::estimate_kind_from_name(kind_name);
    if (!kind) throw CLI::ValidationError("--kind must be cucv, uv, cuv, or omega-cuv");
    if (n != 2 && n != 3) throw CLI::ValidationError("--n must be 2 or 3");
    auto parse_range = [](const std::string& text) {
        auto a = text.find(':');
        auto b = text.find(':', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos)
            throw CLI::ValidationError("range expects lo:hi:step");
        return std::array<dsum::Rational, 3>{dsum::Rational::parse(text.substr(0, a)),
                                             dsum::Rational::parse(text.substr(a + 1, b - a - 1)),
                                             dsum::Rational::parse(text.substr(b + 1))};
    };
    auto sr = parse_range(s_range);
    auto tr = parse_range(th_range);
    dsum::EngineConfig cfg = flags.config();
    auto rows = dsum::sweep(*kind, n, sr[0], sr[1], sr[2], tr[0], tr[1], tr[2], cfg);
    std::string csv = dsum::sweep_csv(rows);
    if (csv_path.empty())
        std::cout << csv;
    else
        write_file(csv_path, csv);
    std::size_t mismatches = 0;
    for (const auto& r : rows)
        if (!r.match) ++mismatches;
    std::cerr << rows.size() << " grid points, " << mismatches << " mismatches\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dsum: uniform-boundedness verifier for constrained dyadic sums"};
    app.require_subcommand(1);

    CommonFlags flags;

    std::string file;
    auto* verify = app.add_subcommand("verify", "verify a .dsum problem file");
    verify->add_option("file", file, "problem file")->required();
    flags.attach(verify);

    auto* repl = app.add_subcommand("repl", "interactive constraint refinement");
    repl->add_option("file", file, "problem file")->required();
    flags.attach(repl);

    std::string kind, s_text, th_text;
    int n = 2;
    auto* paper = app.add_subcommand("paper", "verify a bilinear-estimate case family");
    paper->add_option("--kind", kind, "cucv | uv | cuv | omega-cuv")->required();
    paper->add_option("--n", n, "dimension (2 or 3)")->required();
    paper->add_option("--s", s_text, "Sobolev index (rational or decimal)")->required();
    paper->add_option("--theta", th_text, "modulation index")->required();
    flags.attach(paper);

    std::string s_range, th_range, csv_path;
    auto* sweep = app.add_subcommand("sweep", "grid of paper verdicts vs the reference region");
    sweep->add_option("--kind", kind)->required();
    sweep->add_option("--n", n)->required();
    sweep->add_option("--s", s_range, "s grid as lo:hi:step")->required();
    sweep->add_option("--theta", th_range, "theta grid as lo:hi:step")->required();
    sweep->add_option("--csv", csv_path, "write CSV here instead of stdout");
    flags.attach(sweep);

    try {
        app.parse(argc, argv);
        if (verify->parsed()) return run_verify(file, flags);
        if (repl->parsed()) return run_repl(file, flags);
        if (paper->parsed()) return run_paper(kind, n, s_text, th_text, flags);
        if (sweep->parsed()) return run_sweep(kind, n, s_range, th_range, csv_path, flags);
        return kUsageError;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    } catch (const dsum::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kParseError;
    } catch (const dsum::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
}
