#pragma once

#include <string>

#include "dsum/problem.hpp"

namespace dsum {

struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(int line_, int column_, const std::string& msg)
        : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(column_) + ": " +
                msg),
          line(line_), column(column_) {}
};

// Problem-file grammar:
//   param <name>
//   var <name> ...
//   sum <expr>                  expr = '*'-separated factors, factor = atom['^(p/q)' | '^n']
//   where <term> REL <term>     REL in { ~  <~  >~  <<  >>  <=  >= }
// atoms: variable | power-of-two number | <mono> | min{mono, ...} | max{mono, ...}
// comments run from '#' to end of line.
Problem parse_problem(const std::string& text);

// single constraint in the `where` syntax (REPL `add where ...`)
Constraint parse_constraint(const std::string& text);

// canonical .dsum rendering; parse(print(p)) is structurally identical to p
std::string print_problem(const Problem& p);

} // namespace dsum
