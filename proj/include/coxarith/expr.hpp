#pragma once

#include <stdexcept>
#include <string>

#include "coxarith/tower.hpp"

namespace cox {

// Error with 1-based position information for user-facing input.
struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

// Parses the expression grammar
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := INT | 'sqrt' '(' expr ')' | '(' expr ')' | '-' factor
// over the given tower, which grows in place when new square roots are
// adjoined.  Square roots of negative values and division by zero are
// reported as ParseErrors at the offending position; `line` seeds the
// error position for inputs embedded in larger files.
TowerElement parse_expr(const std::string& text, TowerPtr& tower,
                        int line = 1);

}  // namespace cox
