#include "gdp/query.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace gdp {

std::vector<std::string> Atom::variables() const {
  std::vector<std::string> out;
  for (const auto& t : terms)
    if (t.is_var && std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
  return out;
}

std::vector<std::string> Rule::body_variables() const {
  std::vector<std::string> out;
  for (const auto& a : body)
    for (const auto& t : a.terms)
      if (t.is_var && std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
  return out;
}

void Rule::recompute_var_order() {
  var_order.clear();
  for (const auto& v : head_vars)
    if (std::find(var_order.begin(), var_order.end(), v) == var_order.end()) var_order.push_back(v);
  for (const auto& v : body_variables())
    if (std::find(var_order.begin(), var_order.end(), v) == var_order.end()) var_order.push_back(v);
}

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + msg);
  }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  bool accept(char c) {
    if (peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  bool accept_str(const std::string& s) {
    skip_ws();
    if (text.compare(pos, s.size(), s) == 0) {
      for (std::size_t i = 0; i < s.size(); ++i) advance();
      return true;
    }
    return false;
  }

  std::string identifier() {
    skip_ws();
    if (pos >= text.size() ||
        !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      fail("expected identifier");
    std::string out;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      out += text[pos];
      advance();
    }
    return out;
  }

  Term term() {
    skip_ws();
    if (pos >= text.size()) fail("expected term");
    char c = text[pos];
    if (c == '\'') {
      advance();
      std::string s;
      while (pos < text.size() && text[pos] != '\'') {
        if (text[pos] == '\n') fail("unterminated string constant");
        s += text[pos];
        advance();
      }
      if (pos >= text.size()) fail("unterminated string constant");
      advance();
      return Term::value(Value{s});
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      std::string num;
      if (c == '-') {
        num += c;
        advance();
      }
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        fail("expected digits after '-'");
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        num += text[pos];
        advance();
      }
      return Term::value(parse_value(num));
    }
    return Term::variable(identifier());
  }
};

}  // namespace

Query parse_query(const std::string& text) {
  Lexer lx(text);
  Query q;
  bool first = true;
  while (!lx.eof()) {
    Rule rule;
    std::string head_name = lx.identifier();
    lx.expect('(');
    std::vector<std::string> head;
    if (!lx.accept(')')) {
      while (true) {
        Term t = lx.term();
        if (!t.is_var) lx.fail("head terms must be variables");
        head.push_back(t.var);
        if (lx.accept(')')) break;
        lx.expect(',');
      }
    }
    if (!lx.accept_str(":-")) lx.fail("expected ':-'");
    while (true) {
      Atom atom;
      atom.relation = lx.identifier();
      lx.expect('(');
      if (!lx.accept(')')) {
        while (true) {
          atom.terms.push_back(lx.term());
          if (lx.accept(')')) break;
          lx.expect(',');
        }
      }
      rule.body.push_back(std::move(atom));
      if (lx.accept('.')) break;
      lx.expect(',');
    }
    if (rule.body.empty()) lx.fail("rule body must be non-empty");
    rule.head_vars = head;
    auto body_vars = rule.body_variables();
    for (const auto& v : head)
      if (std::find(body_vars.begin(), body_vars.end(), v) == body_vars.end())
        throw ParseError("unsafe rule for '" + head_name + "': head variable '" + v +
                         "' does not occur in the body");
    rule.recompute_var_order();
    if (first) {
      q.name = head_name;
      q.head_arity = head.size();
      first = false;
    } else {
      if (head_name != q.name)
        throw ParseError("all rules must share the head name: '" + head_name + "' vs '" + q.name +
                         "'");
      if (head.size() != q.head_arity)
        throw ParseError("inconsistent head arity for '" + q.name + "': " +
                         std::to_string(head.size()) + " vs " + std::to_string(q.head_arity));
    }
    q.rules.push_back(std::move(rule));
  }
  if (q.rules.empty()) throw ParseError("no rules found");
  return q;
}

Query parse_query_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open query file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_query(ss.str());
}

namespace {

std::string print_term(const Term& t) {
  if (t.is_var) return t.var;
  if (std::holds_alternative<std::int64_t>(t.constant)) return value_to_string(t.constant);
  return "'" + std::get<std::string>(t.constant) + "'";
}

}  // namespace

std::string print_query(const Query& q) {
  std::string out;
  for (const auto& rule : q.rules) {
    out += q.name + "(";
    for (std::size_t i = 0; i < rule.head_vars.size(); ++i) {
      if (i) out += ",";
      out += rule.head_vars[i];
    }
    out += ") :- ";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (i) out += ", ";
      const Atom& a = rule.body[i];
      out += a.relation + "(";
      for (std::size_t j = 0; j < a.terms.size(); ++j) {
        if (j) out += ",";
        out += print_term(a.terms[j]);
      }
      out += ")";
    }
    out += ".\n";
  }
  return out;
}

Query full_query(const Query& q) {
  Query out = q;
  std::size_t max_head = 0;
  for (auto& rule : out.rules) {
    rule.head_vars = rule.var_order;
    rule.recompute_var_order();
    max_head = std::max(max_head, rule.head_vars.size());
  }
  out.head_arity = max_head;
  return out;
}

Query existential_query(const Query& q) {
  Query out = q;
  out.head_arity = 0;
  for (auto& rule : out.rules) {
    rule.head_vars.clear();
    rule.recompute_var_order();
  }
  return out;
}

Query bind_head(const Query& q, const std::vector<Value>& constants) {
  if (constants.size() != q.head_arity)
    throw std::invalid_argument("bind_head: expected " + std::to_string(q.head_arity) +
                                " constants, got " + std::to_string(constants.size()));
  Query out = q;
  out.head_arity = 0;
  for (auto& rule : out.rules) {
    for (auto& atom : rule.body) {
      for (auto& term : atom.terms) {
        if (!term.is_var) continue;
        for (std::size_t i = 0; i < rule.head_vars.size(); ++i) {
          if (term.var == rule.head_vars[i]) {
            term = Term::value(constants[i]);
            break;
          }
        }
      }
    }
    rule.head_vars.clear();
    rule.recompute_var_order();
  }
  return out;
}

std::vector<Query> identity_queries(const Database& db) {
  std::vector<Query> out;
  for (const auto& rel : db.relations) {
    Query q;
    q.name = "Id" + rel.name;
    q.head_arity = rel.arity;
    Rule rule;
    Atom atom;
    atom.relation = rel.name;
    for (std::size_t i = 0; i < rel.arity; ++i) {
      std::string v = "x" + std::to_string(i + 1);
      rule.head_vars.push_back(v);
      atom.terms.push_back(Term::variable(v));
    }
    rule.body.push_back(std::move(atom));
    rule.recompute_var_order();
    q.rules.push_back(std::move(rule));
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace gdp
