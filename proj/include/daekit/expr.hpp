#ifndef DAEKIT_EXPR_HPP
#define DAEKIT_EXPR_HPP

#include "daekit/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace daekit::expr {

// Small arithmetic expression language over named scalar variables:
//   expr   := term  (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := ('+'|'-')* primary
//   primary:= number | name | name '(' expr ')' | '(' expr ')'
// Functions: sin, cos, exp, abs.
class Expression {
public:
    double eval(const std::map<std::string, double>& vars) const;
    const std::vector<std::string>& variables() const { return vars_; }

    struct Node;
    std::shared_ptr<const Node> root;

private:
    friend Expression parse(const std::string& text, const std::vector<std::string>& allowed);
    std::vector<std::string> vars_; // variables actually referenced
};

// Parses text; any referenced name must appear in `allowed` (or be a known
// function). Throws ParseError on malformed input.
Expression parse(const std::string& text, const std::vector<std::string>& allowed);

// Convenience: variables named t, x1..xn bound from (t, x).
double eval_tx(const Expression& e, double t, const Vector& x);

} // namespace daekit::expr

#endif
