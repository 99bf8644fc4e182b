#include "dsum/dsl.hpp"

#include <cctype>
#include <sstream>

namespace dsum {

namespace {

struct Token {
    enum class Kind { Name, Number, Punct, End } kind = Kind::End;
    std::string text;
    int column = 0;
};

// one statement line -> token stream; relation symbols are single tokens
std::vector<Token> tokenize_line(const std::string& line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto peek2 = [&](const char* s) {
        return line.compare(i, 2, s) == 0;
    };
    while (i < line.size()) {
        char ch = line[i];
        if (ch == '#') break;
        if (std::isspace((unsigned char)ch)) {
            ++i;
            continue;
        }
        int col = (int)i + 1;
        if (std::isalpha((unsigned char)ch) || ch == '_') {
            std::size_t j = i;
            while (j < line.size() &&
                   (std::isalnum((unsigned char)line[j]) || line[j] == '_'))
                ++j;
            out.push_back({Token::Kind::Name, line.substr(i, j - i), col});
            i = j;
            continue;
        }
        if (std::isdigit((unsigned char)ch)) {
            std::size_t j = i;
            while (j < line.size() && (std::isdigit((unsigned char)line[j]) || line[j] == '.'))
                ++j;
            out.push_back({Token::Kind::Number, line.substr(i, j - i), col});
            i = j;
            continue;
        }
        for (const char* two : {"<~", ">~", "<<", ">>", "<=", ">="}) {
            if (peek2(two)) {
                out.push_back({Token::Kind::Punct, two, col});
                i += 2;
                goto next;
            }
        }
        if (std::string("~<>{},*^()/-").find(ch) != std::string::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, ch), col});
            ++i;
            continue;
        }
        throw ParseError(lineno, col, std::string("unexpected character '") + ch + "'");
    next:;
    }
    return out;
}

class LineParser {
  public:
    LineParser(std::vector<Token> tokens, int lineno)
        : tokens_(std::move(tokens)), lineno_(lineno) {}

    bool done() const { return pos_ >= tokens_.size(); }
    const Token& peek() const {
        static Token end{Token::Kind::End, "", 0};
        return done() ? end : tokens_[pos_];
    }
    Token next() {
        Token t = peek();
        if (!done()) ++pos_;
        return t;
    }
    bool accept(const std::string& punct) {
        if (peek().kind == Token::Kind::Punct && peek().text == punct) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const std::string& punct, const std::string& what) {
        if (!accept(punct)) fail("expected '" + punct + "' " + what);
    }
    [[noreturn]] void fail(const std::string& msg) const {
        int col = done() ? (tokens_.empty() ? 1 : tokens_.back().column + 1) : peek().column;
        throw ParseError(lineno_, col, msg);
    }

    // rational exponent: ^(p/q) | ^(p) | ^(decimal) | ^n
    Rational parse_power() {
        if (accept("(")) {
            bool neg = accept("-");
            std::string text;
            if (peek().kind != Token::Kind::Number) fail("expected exponent");
            text = next().text;
            if (accept("/")) {
                if (peek().kind != Token::Kind::Number) fail("expected denominator");
                text += "/" + next().text;
            }
            expect(")", "after exponent");
            Rational r = Rational::parse(text);
            return neg ? -r : r;
        }
        if (peek().kind == Token::Kind::Number) return Rational::parse(next().text);
        fail("expected exponent after '^'");
    }

    // a power-of-two literal, possibly p/q
    Rational parse_number_log2() {
        std::string text = next().text;
        if (accept("/")) {
            if (peek().kind != Token::Kind::Number) fail("expected denominator");
            text += "/" + next().text;
        }
        Rational value = Rational::parse(text);
        try {
            return Rational::log2_of_power_of_two(value);
        } catch (const Error&) {
            fail("numeric coefficients must be powers of two, got " + text);
        }
    }

    Monomial parse_monomial() {
        Monomial m;
        while (true) {
            if (peek().kind == Token::Kind::Name) {
                std::string name = next().text;
                Rational p = accept("^") ? parse_power() : Rational(1);
                m.set_power(name, m.power(name) + SymExp(p));
            } else if (peek().kind == Token::Kind::Number) {
                Rational lg = parse_number_log2();
                Rational p = accept("^") ? parse_power() : Rational(1);
                m.set_coeff_log2(m.coeff_log2() + SymExp(p * lg));
            } else {
                fail("expected variable or number");
            }
            if (!accept("*")) break;
            // inside min/max/bracket arguments a monomial never contains
            // brackets, so plain continuation is unambiguous
        }
        return m;
    }

    std::vector<Monomial> parse_minmax_args() {
        expect("{", "after min/max");
        std::vector<Monomial> args;
        args.push_back(parse_monomial());
        while (accept(",")) args.push_back(parse_monomial());
        expect("}", "closing min/max");
        if (args.size() < 2) fail("min/max needs at least two arguments");
        return args;
    }

    ConstraintTerm parse_term() {
        if (peek().kind == Token::Kind::Name && (peek().text == "min" || peek().text == "max")) {
            bool is_min = next().text == "min";
            auto args = parse_minmax_args();
            return is_min ? ConstraintTerm::min_of(std::move(args))
                          : ConstraintTerm::max_of(std::move(args));
        }
        return ConstraintTerm::mono(parse_monomial());
    }

    Summand parse_summand() {
        Summand s;
        while (true) {
            if (accept("<")) {
                Monomial arg = parse_monomial();
                expect(">", "closing bracket");
                Rational p = accept("^") ? parse_power() : Rational(1);
                s.append(Factor::bracket(std::move(arg), SymExp(p)));
            } else if (peek().kind == Token::Kind::Name &&
                       (peek().text == "min" || peek().text == "max")) {
                bool is_min = next().text == "min";
                auto args = parse_minmax_args();
                Rational p = accept("^") ? parse_power() : Rational(1);
                s.append(is_min ? Factor::min_of(std::move(args), SymExp(p))
                                : Factor::max_of(std::move(args), SymExp(p)));
            } else {
                s.append(Factor::mono(parse_monomial()));
            }
            if (!accept("*")) break;
        }
        if (!done()) fail("trailing input after summand");
        return s;
    }

    Constraint parse_where() {
        ConstraintTerm lhs = parse_term();
        if (peek().kind != Token::Kind::Punct) fail("expected relation");
        auto rel = relation_from_symbol(peek().text);
        if (!rel) fail("unknown relation '" + peek().text + "'");
        next();
        ConstraintTerm rhs = parse_term();
        if (!done()) fail("trailing input after constraint");
        return Constraint{std::move(lhs), *rel, std::move(rhs)};
    }

  private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int lineno_;
};

} // namespace

Problem parse_problem(const std::string& text) {
    Problem p;
    bool have_param = false, have_sum = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<Token> tokens = tokenize_line(line, lineno);
        if (tokens.empty()) continue;
        LineParser lp(std::move(tokens), lineno);
        if (lp.peek().kind != Token::Kind::Name)
            lp.fail("expected param/var/sum/where");
        std::string head = lp.next().text;
        if (head == "param") {
            if (have_param) lp.fail("second param line");
            if (lp.peek().kind != Token::Kind::Name) lp.fail("expected parameter name");
            p.param = lp.next().text;
            if (!lp.done()) lp.fail("trailing input after param");
            have_param = true;
        } else if (head == "var") {
            if (lp.peek().kind != Token::Kind::Name) lp.fail("expected variable name");
            while (lp.peek().kind == Token::Kind::Name)
                p.variables.push_back({lp.next().text, VarRole::Summation});
            if (!lp.done()) lp.fail("trailing input after var list");
        } else if (head == "sum") {
            if (have_sum) lp.fail("second sum line");
            p.summand = lp.parse_summand();
            have_sum = true;
        } else if (head == "where") {
            p.constraints.push_back(lp.parse_where());
        } else {
            lp.fail("unknown directive '" + head + "'");
        }
    }
    if (!have_param) throw ParseError(lineno, 1, "missing param line");
    if (!have_sum) throw ParseError(lineno, 1, "missing sum line");
    p.validate(); // throws on undeclared identifiers etc.
    return p;
}

Constraint parse_constraint(const std::string& text) {
    std::vector<Token> tokens = tokenize_line(text, 1);
    if (tokens.empty()) throw ParseError(1, 1, "empty constraint");
    LineParser lp(std::move(tokens), 1);
    return lp.parse_where();
}

std::string print_problem(const Problem& p) {
    std::string out;
    out += "param " + p.param + "\n";
    out += "var";
    for (const auto& v : p.variables) out += " " + v.name;
    out += "\n";
    out += "sum " + p.summand.str() + "\n";
    for (const auto& c : p.constraints) out += "where " + c.str() + "\n";
    return out;
}

} // namespace dsum
