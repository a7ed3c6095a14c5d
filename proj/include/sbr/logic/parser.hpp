#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sbr/logic/formula.hpp"

namespace sbr::logic {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t position_;
};

// Parses one rule:
//   rule  := quant+ "." expr
//   quant := ("forall" | "exists" | "exists[" INT "]") IDENT ":" DOMAIN
//   expr  := impl ("<=>" impl)*
//   impl  := disj ("=>" impl)?
//   disj  := conj ("or" conj)*
//   conj  := unary ("and" unary)*
//   unary := "not" unary | atom | "(" expr ")"
//   atom  := PRED "(" IDENT ("," IDENT)? ")"
// Text after '#' is ignored. Throws ParseError on syntax errors, unbound
// variables and duplicate quantified variables.
Formula parse_rule(std::string_view text);

// One rule per nonblank, non-comment line. Errors carry the 1-based line in
// the message and the offset within that line as position().
std::vector<Formula> parse_rules(std::string_view text);

}  // namespace sbr::logic
