#include "dsum/problem.hpp"

#include <set>

namespace dsum {

std::vector<std::string> Problem::validate() const {
    std::set<std::string> declared;
    for (const auto& v : variables) {
        if (!declared.insert(v.name).second)
            throw Error("duplicate variable: " + v.name);
    }
    if (param.empty()) throw Error("no growth parameter declared");
    if (declared.count(param)) throw Error("growth parameter also declared as summation variable: " + param);
    declared.insert(param);

    if (!summand.is_concrete())
        throw Error("summand has unbound symbolic exponents (substitute_params first)");
    for (const auto& v : summand.variables())
        if (!declared.count(v)) throw Error("undeclared variable in summand: " + v);

    bool param_constrained = false;
    for (const auto& c : constraints) {
        for (const auto& v : c.variables()) {
            if (!declared.count(v)) throw Error("undeclared variable in constraint: " + v);
            if (v == param) param_constrained = true;
        }
    }

    std::vector<std::string> notes;
    if (!param_constrained)
        notes.push_back("note: growth parameter " + param +
                        " appears in no constraint; sums are parameter-independent");
    return notes;
}

} // namespace dsum
