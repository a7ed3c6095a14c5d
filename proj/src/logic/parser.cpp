#include "sbr/logic/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <utility>

namespace sbr::logic {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      detail_(message),
      position_(position) {}

namespace {

enum class Tok { ident, integer, lparen, rparen, lbracket, rbracket, comma, colon, dot, implies, iff, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t pos = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Tok::ident;
      t.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Tok::integer;
      t.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (text.substr(i, 3) == "<=>") {
      t.kind = Tok::iff;
      i += 3;
    } else if (text.substr(i, 2) == "=>") {
      t.kind = Tok::implies;
      i += 2;
    } else {
      switch (c) {
        case '(': t.kind = Tok::lparen; break;
        case ')': t.kind = Tok::rparen; break;
        case '[': t.kind = Tok::lbracket; break;
        case ']': t.kind = Tok::rbracket; break;
        case ',': t.kind = Tok::comma; break;
        case ':': t.kind = Tok::colon; break;
        case '.': t.kind = Tok::dot; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
      ++i;
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::end;
  end.pos = text.size();
  out.push_back(end);
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "forall" || s == "exists" || s == "and" || s == "or" || s == "not";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula rule() {
    Formula f;
    // Quantifiers may be chained with or without a '.' between them.
    while (at_quantifier()) {
      f.quantifiers.push_back(quantifier());
      if (peek().kind == Tok::dot && next_is_quantifier()) ++pos_;
    }
    if (f.quantifiers.empty()) {
      throw ParseError("expected a quantifier", peek().pos);
    }
    expect(Tok::dot, "'.' after the quantifier prefix");
    f.body = expr();
    if (peek().kind != Tok::end) {
      throw ParseError("unexpected trailing input", peek().pos);
    }
    validate(f);
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  bool is_quantifier(const Token& t) const {
    return t.kind == Tok::ident && (t.text == "forall" || t.text == "exists");
  }
  bool at_quantifier() const { return is_quantifier(peek()); }
  bool next_is_quantifier() const { return is_quantifier(tokens_[pos_ + 1]); }

  bool accept_word(const char* word) {
    if (peek().kind == Tok::ident && peek().text == word) {
      ++pos_;
      return true;
    }
    return false;
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what, peek().pos);
    }
    return next();
  }

  std::string identifier(const char* what) {
    const Token& t = expect(Tok::ident, what);
    if (is_keyword(t.text)) {
      throw ParseError("keyword '" + t.text + "' used as " + what, t.pos);
    }
    return t.text;
  }

  Quantifier quantifier() {
    Quantifier q;
    const Token& word = next();
    if (word.text == "forall") {
      q.kind = QuantifierKind::forall;
    } else if (peek().kind == Tok::lbracket) {
      ++pos_;
      const Token& n = expect(Tok::integer, "a count inside exists[...]");
      q.kind = QuantifierKind::exists_n;
      q.count = std::stoul(n.text);
      if (q.count == 0) throw ParseError("exists[n] requires n >= 1", n.pos);
      expect(Tok::rbracket, "']'");
    } else {
      q.kind = QuantifierKind::exists;
    }
    q.variable = identifier("a variable name");
    variable_pos_[q.variable].push_back(word.pos);
    expect(Tok::colon, "':' before the domain");
    q.domain = identifier("a domain name");
    return q;
  }

  Expr expr() {
    Expr lhs = implication();
    while (peek().kind == Tok::iff) {
      ++pos_;
      lhs = Expr::binary(NodeKind::equivalence, std::move(lhs), implication());
    }
    return lhs;
  }

  Expr implication() {
    Expr lhs = disjunction();
    if (peek().kind == Tok::implies) {
      ++pos_;
      return Expr::binary(NodeKind::implication, std::move(lhs), implication());
    }
    return lhs;
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    while (accept_word("or")) {
      lhs = Expr::binary(NodeKind::disjunction, std::move(lhs), conjunction());
    }
    return lhs;
  }

  Expr conjunction() {
    Expr lhs = unary();
    while (accept_word("and")) {
      lhs = Expr::binary(NodeKind::conjunction, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (accept_word("not")) return Expr::negation(unary());
    if (peek().kind == Tok::lparen) {
      ++pos_;
      Expr inner = expr();
      expect(Tok::rparen, "')'");
      return inner;
    }
    return atom();
  }

  Expr atom() {
    const std::size_t at = peek().pos;
    std::string name = identifier("a predicate name");
    expect(Tok::lparen, "'(' after the predicate name");
    std::vector<std::string> args;
    argument(args);
    if (peek().kind == Tok::comma) {
      ++pos_;
      argument(args);
    }
    if (peek().kind == Tok::comma) {
      throw ParseError("predicate '" + name + "' has arity greater than 2", at);
    }
    expect(Tok::rparen, "')' closing the argument list");
    return Expr::atom(std::move(name), std::move(args));
  }

  void argument(std::vector<std::string>& args) {
    const std::size_t at = peek().pos;
    args.push_back(identifier("a variable"));
    uses_.emplace_back(args.back(), at);
  }

  void validate(const Formula&) const {
    for (const auto& [name, positions] : variable_pos_) {
      if (positions.size() > 1) {
        throw ParseError("duplicate quantified variable '" + name + "'", positions[1]);
      }
    }
    for (const auto& [name, at] : uses_) {
      if (variable_pos_.count(name) == 0) {
        throw ParseError("unbound variable '" + name + "'", at);
      }
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::map<std::string, std::vector<std::size_t>> variable_pos_;
  std::vector<std::pair<std::string, std::size_t>> uses_;
};

}  // namespace

Formula parse_rule(std::string_view text) {
  return Parser(tokenize(text)).rule();
}

std::vector<Formula> parse_rules(std::string_view text) {
  std::vector<Formula> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      try {
        out.push_back(parse_rule(line));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.detail(), e.position());
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace sbr::logic
