// SPDX-License-Identifier: Apache-2.0
#include "entropik/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace entropik {

std::string format_diagnostic(const ParseDiagnostic& d) {
  std::ostringstream os;
  os << d.span.file << ":" << d.span.line << ":" << d.span.col_start << ": "
     << (d.severity == ParseDiagnostic::Severity::error ? "error" : "warning");
  if (!d.code.empty()) os << "[" << d.code << "]";
  os << ": " << d.message;
  if (!d.hint.empty()) os << " (hint: " << d.hint << ")";
  return os.str();
}

namespace {

enum class Tok { ident, number, op, ge, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int col = 1;
  int end_col = 1;
};

struct ParseFailure {
  ParseDiagnostic diag;
};

ParseDiagnostic make_diag(const SourceSpan& base, int line, int c0, int c1, std::string msg,
                          std::string hint = {}) {
  ParseDiagnostic d;
  d.message = std::move(msg);
  d.span = base;
  d.span.line = line;
  d.span.col_start = std::max(1, c0);
  d.span.col_end = std::max(d.span.col_start, c1);
  d.hint = std::move(hint);
  return d;
}

// Tokenizes one line; '#' starts a comment.  Column offsets are 1-based.
std::vector<Token> lex(const std::string& line, int col_offset, const SourceSpan& base, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char c = static_cast<unsigned char>(line[i]);
    if (c == '#') break;
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    Token t;
    t.col = static_cast<int>(i) + col_offset;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) {
        ++j;
      }
      t.kind = Tok::ident;
      t.text = line.substr(i, j - i);
      i = j;
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      if (j < line.size() && line[j] == '.') {
        throw ParseFailure{make_diag(base, line_no, t.col, static_cast<int>(j) + col_offset,
                                     "decimal literals are not supported",
                                     "write exact rationals such as 3/2")};
      }
      t.kind = Tok::number;
      t.text = line.substr(i, j - i);
      i = j;
    } else if (c == '>' && i + 1 < line.size() && line[i + 1] == '=') {
      t.kind = Tok::ge;
      t.text = ">=";
      i += 2;
    } else if (std::string("+-*/^(),=:").find(static_cast<char>(c)) != std::string::npos) {
      t.kind = Tok::op;
      t.text = std::string(1, static_cast<char>(c));
      ++i;
    } else {
      throw ParseFailure{make_diag(base, line_no, t.col, t.col,
                                   std::string("unexpected character '") + static_cast<char>(c) + "'")};
    }
    t.end_col = static_cast<int>(i) + col_offset - 1;
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::end;
  end.col = static_cast<int>(line.size()) + col_offset;
  end.end_col = end.col;
  out.push_back(end);
  return out;
}

std::optional<Atom> single_atom(const Expr& e) {
  if (!e.den().is_constant() || e.den().constant_term() != 1) return std::nullopt;
  if (!e.num().is_monomial()) return std::nullopt;
  const Term& t = e.num().leading();
  if (t.coef != 1 || t.mono.size() != 1 || t.mono[0].exp != 1) return std::nullopt;
  return Atom::from_id(t.mono[0].var);
}

// Resolves identifiers against the declarations seen so far.
class Resolver {
 public:
  Resolver(const ModelDef& m, const ExpressionScope& scope) : m_(m), scope_(scope) {}

  std::optional<int> deriv_operator(const std::string& name) const {
    if (name.size() < 2 || name[0] != 'd') return std::nullopt;
    for (std::size_t i = 0; i < m_.indep.size(); ++i) {
      if (name.substr(1) == m_.indep[i]) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  const std::vector<Atom>* function_args(const std::string& name) const {
    if (const ConstitDecl* d = m_.find_constit(name)) return &d->args;
    auto it = scope_.extra_functions.find(name);
    return it == scope_.extra_functions.end() ? nullptr : &it->second;
  }

  bool is_indep(const std::string& name) const {
    return std::find(m_.indep.begin(), m_.indep.end(), name) != m_.indep.end();
  }

  std::optional<Atom> jet_shorthand(const std::string& name) const {
    for (std::size_t k = 1; k + 1 < name.size(); ++k) {
      if (name[k] != '_') continue;
      std::string field = name.substr(0, k);
      if (!m_.is_field(field)) continue;
      MultiIndex idx(m_.indep.size(), 0);
      if (split_indep(name.substr(k + 1), 0, idx)) return m_.jet(field, idx);
    }
    return std::nullopt;
  }

  bool partial_notation() const { return scope_.partial_notation; }
  const ModelDef& model() const { return m_; }
  JetContext context() const {
    JetContext ctx = m_.context();
    for (const auto& [name, args] : scope_.extra_functions) {
      std::vector<std::string> labels;
      for (const auto& a : args) labels.push_back(a.str());
      ctx.constit[name] = ConstitSignature{args, labels};
    }
    return ctx;
  }

 private:
  bool split_indep(const std::string& s, std::size_t pos, MultiIndex& idx) const {
    if (pos == s.size()) return true;
    for (std::size_t i = 0; i < m_.indep.size(); ++i) {
      const std::string& v = m_.indep[i];
      if (s.compare(pos, v.size(), v) == 0) {
        idx[i] += 1;
        if (split_indep(s, pos + v.size(), idx)) return true;
        idx[i] -= 1;
      }
    }
    return false;
  }

  const ModelDef& m_;
  const ExpressionScope& scope_;
};

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t pos, const Resolver& r,
             const SourceSpan& base, int line)
      : toks_(toks), pos_(pos), r_(r), base_(base), line_(line) {}

  ast::NodePtr parse_expr() {
    ast::NodePtr lhs = parse_term();
    while (peek_op("+") || peek_op("-")) {
      bool plus = toks_[pos_].text == "+";
      ++pos_;
      ast::NodePtr rhs = parse_term();
      lhs = ast::binary(plus ? ast::Kind::add : ast::Kind::sub, lhs, rhs);
    }
    return lhs;
  }

  std::size_t pos() const { return pos_; }
  const Token& peek() const { return toks_[pos_]; }

  [[noreturn]] void fail(const Token& t, std::string msg, std::string hint = {}) const {
    throw ParseFailure{make_diag(base_, line_, t.col, t.end_col, std::move(msg), std::move(hint))};
  }

  void expect_op(const std::string& op) {
    if (!peek_op(op)) fail(peek(), "expected '" + op + "'" + found());
    ++pos_;
  }

  bool peek_op(const std::string& op) const {
    return toks_[pos_].kind == Tok::op && toks_[pos_].text == op;
  }

  std::string found() const {
    const Token& t = peek();
    return t.kind == Tok::end ? " at end of line" : " but found '" + t.text + "'";
  }

  void skip() { ++pos_; }

 private:
  ast::NodePtr parse_term() {
    ast::NodePtr lhs = parse_unary();
    while (peek_op("*") || peek_op("/")) {
      bool mul = toks_[pos_].text == "*";
      ++pos_;
      ast::NodePtr rhs = parse_unary();
      lhs = ast::binary(mul ? ast::Kind::mul : ast::Kind::div, lhs, rhs);
    }
    return lhs;
  }

  ast::NodePtr parse_unary() {
    if (peek_op("-")) {
      ++pos_;
      return ast::negate(parse_unary());
    }
    if (peek_op("+")) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  ast::NodePtr parse_power() {
    ast::NodePtr base = parse_primary();
    if (!peek_op("^")) return base;
    ++pos_;
    bool paren = false;
    if (peek_op("(")) {
      paren = true;
      ++pos_;
    }
    bool negative = false;
    if (peek_op("-")) {
      negative = true;
      ++pos_;
    }
    if (peek().kind != Tok::number) fail(peek(), "expected an integer exponent" + found());
    long long e = std::stoll(peek().text);
    if (e > 1000) fail(peek(), "exponent too large");
    ++pos_;
    if (paren) expect_op(")");
    if (peek_op("^")) fail(peek(), "chained powers are ambiguous", "add parentheses");
    return ast::power(base, static_cast<int>(negative ? -e : e));
  }

  ast::NodePtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      ++pos_;
      return ast::number(mpq_class(t.text));
    }
    if (peek_op("(")) {
      ++pos_;
      ast::NodePtr inner = parse_expr();
      expect_op(")");
      return inner;
    }
    if (t.kind != Tok::ident) fail(t, "expected an expression" + found());
    return parse_identifier();
  }

  ast::NodePtr parse_identifier() {
    const Token tok = peek();
    const std::string& name = tok.text;
    ++pos_;
    if (auto var = r_.deriv_operator(name); var && peek_op("(")) {
      ++pos_;
      ast::NodePtr inner = parse_expr();
      expect_op(")");
      return ast::deriv(*var, inner);
    }
    if (r_.partial_notation() && name.size() > 1 && name[0] == 'd') {
      if (auto partial = try_partial(name.substr(1))) return ast::symbol(*partial);
    }
    if (const std::vector<Atom>* args = r_.function_args(name)) {
      if (peek_op("(")) check_call(tok, *args);
      return ast::symbol(Atom::constit(name));
    }
    if (r_.is_indep(name)) return ast::symbol(Atom::indep(name));
    if (r_.model().is_field(name)) return ast::symbol(r_.model().jet(name, MultiIndex(r_.model().indep.size(), 0)));
    if (auto jet = r_.jet_shorthand(name)) return ast::symbol(*jet);
    fail(tok, "unknown identifier '" + name + "'",
         "declare it as an independent variable, field or constitutive symbol");
  }

  // d<sym>/d<arg>[/d<arg>...] partial-derivative notation.
  std::optional<Atom> try_partial(const std::string& sym) {
    const std::vector<Atom>* args = r_.function_args(sym);
    if (args == nullptr) return std::nullopt;
    MultiIndex slots(args->size(), 0);
    std::vector<std::string> labels;
    for (const auto& a : *args) labels.push_back(a.str());
    std::size_t p = pos_;
    bool any = false;
    while (p + 1 < toks_.size() && toks_[p].kind == Tok::op && toks_[p].text == "/" &&
           toks_[p + 1].kind == Tok::ident && toks_[p + 1].text.size() > 1 &&
           toks_[p + 1].text[0] == 'd') {
      std::string label = toks_[p + 1].text.substr(1);
      auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) break;
      slots[static_cast<std::size_t>(it - labels.begin())] += 1;
      p += 2;
      any = true;
    }
    if (!any) return std::nullopt;
    pos_ = p;
    return Atom::partial(sym, slots, labels);
  }

  void check_call(const Token& tok, const std::vector<Atom>& declared) {
    expect_op("(");
    std::vector<std::pair<ast::NodePtr, Token>> args;
    if (!peek_op(")")) {
      while (true) {
        Token at = peek();
        args.emplace_back(parse_expr(), at);
        if (peek_op(",")) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect_op(")");
    if (args.size() != declared.size()) {
      fail(tok, "arity mismatch: '" + tok.text + "' is declared with " +
                    std::to_string(declared.size()) + " argument(s) but used with " +
                    std::to_string(args.size()));
    }
    JetContext ctx = r_.context();
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto atom = single_atom(ast::evaluate(args[i].first, ctx));
      if (!atom || *atom != declared[i]) {
        fail(args[i].second, "argument " + std::to_string(i + 1) + " of '" + tok.text +
                                 "' differs from its declaration '" + declared[i].str() + "'");
      }
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
  const Resolver& r_;
  const SourceSpan& base_;
  int line_;
};

struct SourceLine {
  int no = 0;
  std::vector<Token> toks;
};

class ModelParser {
 public:
  ModelParser(const std::string& text, const std::string& file) {
    base_.file = file;
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      try {
        auto toks = lex(raw, 1, base_, no);
        if (toks.size() > 1) lines_.push_back({no, std::move(toks)});
      } catch (const ParseFailure& f) {
        diags_.push_back(f.diag);
      }
    }
    last_line_ = std::max(1, no);
  }

  ParseResult run() {
    // Declarations first so that statements may appear in any order.
    for (const auto& l : lines_) dispatch(l, Phase::variables);
    for (const auto& l : lines_) dispatch(l, Phase::constitutive);
    for (const auto& l : lines_) dispatch(l, Phase::statements);
    if (entropy_lines_ == 0) {
      add(last_line_, 1, 1, "model requires exactly one entropy inequality",
          "add a line 'entropy: <expr> >= 0'");
    }
    if (!leading_line_) add(last_line_, 1, 1, "model requires a 'leading:' line");
    if (m_.indep.empty()) add(last_line_, 1, 1, "model requires an 'independent' line");
    if (m_.fields.empty()) add(last_line_, 1, 1, "model requires a 'field' line");
    ParseResult result;
    if (has_errors()) {
      result.diagnostics = std::move(diags_);
      return result;
    }
    for (const auto& p : validate_model(m_)) {
      int line = last_line_;
      switch (p.where) {
        case ModelProblem::Where::leading:
          line = leading_line_.value_or(last_line_);
          break;
        case ModelProblem::Where::equation:
          if (p.index < equation_lines_.size()) line = equation_lines_[p.index];
          break;
        case ModelProblem::Where::constit:
          if (p.index < constit_lines_.size()) line = constit_lines_[p.index];
          break;
        case ModelProblem::Where::general:
          break;
      }
      add(line, 1, 1, p.message);
    }
    if (!has_errors()) result.model = std::move(m_);
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  enum class Phase { variables, constitutive, statements };

  void add(int line, int c0, int c1, std::string msg, std::string hint = {}) {
    diags_.push_back(make_diag(base_, line, c0, c1, std::move(msg), std::move(hint)));
  }

  bool has_errors() const {
    return std::any_of(diags_.begin(), diags_.end(), [](const ParseDiagnostic& d) {
      return d.severity == ParseDiagnostic::Severity::error;
    });
  }

  void dispatch(const SourceLine& l, Phase phase) {
    const Token& head = l.toks[0];
    const std::string& kw = head.text;
    Phase wanted;
    if (kw == "independent" || kw == "field") {
      wanted = Phase::variables;
    } else if (kw == "constitutive") {
      wanted = Phase::constitutive;
    } else {
      wanted = Phase::statements;
    }
    if (wanted != phase) return;
    try {
      if (head.kind != Tok::ident) {
        add(l.no, head.col, head.end_col, "expected a statement keyword");
      } else if (kw == "independent") {
        names_statement(l, m_.indep);
      } else if (kw == "field") {
        names_statement(l, m_.fields);
      } else if (kw == "constitutive") {
        constitutive_statement(l);
      } else if (kw == "equation") {
        equation_statement(l);
      } else if (kw == "entropy") {
        entropy_statement(l);
      } else if (kw == "leading") {
        leading_statement(l);
      } else if (kw == "assume") {
        assume_statement(l);
      } else if (kw == "max_order") {
        max_order_statement(l);
      } else {
        add(l.no, head.col, head.end_col, "unknown statement '" + kw + "'",
            "expected independent, field, constitutive, equation, entropy, leading, assume or max_order");
      }
    } catch (const ParseFailure& f) {
      diags_.push_back(f.diag);
    }
  }

  bool name_taken(const std::string& n) const {
    return std::find(m_.indep.begin(), m_.indep.end(), n) != m_.indep.end() || m_.is_field(n) ||
           m_.find_constit(n) != nullptr;
  }

  void names_statement(const SourceLine& l, std::vector<std::string>& target) {
    std::size_t i = 1;
    if (l.toks[i].kind == Tok::end) fail(l, l.toks[i], "expected at least one name");
    for (; l.toks[i].kind != Tok::end; ++i) {
      const Token& t = l.toks[i];
      if (t.kind != Tok::ident) fail(l, t, "expected a name but found '" + t.text + "'");
      if (name_taken(t.text)) fail(l, t, "duplicate declaration of '" + t.text + "'");
      target.push_back(t.text);
    }
  }

  ExprParser parser_at(const SourceLine& l, std::size_t pos, const Resolver& r) {
    return ExprParser(l.toks, pos, r, base_, l.no);
  }

  [[noreturn]] void fail(const SourceLine& l, const Token& t, std::string msg, std::string hint = {}) {
    throw ParseFailure{make_diag(base_, l.no, t.col, t.end_col, std::move(msg), std::move(hint))};
  }

  Atom jet_argument(ExprParser& p, const Resolver& r, const SourceLine& l) {
    Token at = p.peek();
    ast::NodePtr n = p.parse_expr();
    auto atom = single_atom(ast::evaluate(n, r.context()));
    if (!atom || atom->kind() != AtomKind::jet) fail(l, at, "expected a field or field derivative");
    return *atom;
  }

  void constitutive_statement(const SourceLine& l) {
    const Token& name = l.toks[1];
    if (name.kind != Tok::ident) fail(l, name, "expected a constitutive symbol name");
    if (name_taken(name.text)) fail(l, name, "duplicate declaration of '" + name.text + "'");
    ExpressionScope scope;
    scope.partial_notation = false;
    Resolver r(m_, scope);
    ExprParser p = parser_at(l, 2, r);
    p.expect_op("(");
    ConstitDecl d;
    d.name = name.text;
    if (!p.peek_op(")")) {
      while (true) {
        Token at = p.peek();
        Atom a = jet_argument(p, r, l);
        if (std::find(d.args.begin(), d.args.end(), a) != d.args.end()) {
          fail(l, at, "argument '" + a.str() + "' repeated");
        }
        d.args.push_back(a);
        if (p.peek_op(",")) {
          p.skip();
          continue;
        }
        break;
      }
    }
    p.expect_op(")");
    if (p.peek().kind == Tok::ident && p.peek().text == "symmetric") {
      p.skip();
      if (!p.peek_op("(")) p.fail(p.peek(), "expected '(' after 'symmetric'");
      while (p.peek_op("(")) {
        p.skip();
        Token at = p.peek();
        Atom a = jet_argument(p, r, l);
        p.expect_op(",");
        Atom b = jet_argument(p, r, l);
        p.expect_op(")");
        auto slot = [&](const Atom& x) {
          auto it = std::find(d.args.begin(), d.args.end(), x);
          if (it == d.args.end()) fail(l, at, "'" + x.str() + "' is not an argument of '" + d.name + "'");
          return static_cast<int>(it - d.args.begin());
        };
        d.symmetric.emplace_back(slot(a), slot(b));
      }
    }
    if (p.peek().kind != Tok::end) p.fail(p.peek(), "unexpected '" + p.peek().text + "'");
    m_.constit.push_back(std::move(d));
    constit_lines_.push_back(l.no);
  }

  void equation_statement(const SourceLine& l) {
    const Token& label = l.toks[1];
    if (label.kind != Tok::ident) fail(l, label, "expected an equation label");
    for (const auto& e : m_.equations) {
      if (e.label == label.text) fail(l, label, "duplicate declaration of equation '" + label.text + "'");
    }
    ExpressionScope scope;
    scope.partial_notation = false;
    Resolver r(m_, scope);
    ExprParser p = parser_at(l, 2, r);
    p.expect_op(":");
    ast::NodePtr lhs = p.parse_expr();
    p.expect_op("=");
    ast::NodePtr rhs = p.parse_expr();
    if (p.peek().kind != Tok::end) p.fail(p.peek(), "unexpected '" + p.peek().text + "'");
    m_.equations.push_back({label.text, lhs, rhs});
    equation_lines_.push_back(l.no);
  }

  void entropy_statement(const SourceLine& l) {
    ++entropy_lines_;
    if (entropy_lines_ > 1) {
      fail(l, l.toks[0], "model requires exactly one entropy inequality", "remove the extra entropy line");
    }
    ExpressionScope scope;
    scope.partial_notation = false;
    Resolver r(m_, scope);
    ExprParser p = parser_at(l, 1, r);
    p.expect_op(":");
    ast::NodePtr lhs = p.parse_expr();
    if (p.peek().kind != Tok::ge) p.fail(p.peek(), "expected '>='" + p.found());
    p.skip();
    ast::NodePtr rhs = p.parse_expr();
    if (p.peek().kind != Tok::end) p.fail(p.peek(), "unexpected '" + p.peek().text + "'");
    m_.entropy_lhs = lhs;
    m_.entropy_rhs = rhs;
  }

  void leading_statement(const SourceLine& l) {
    if (leading_line_) fail(l, l.toks[0], "duplicate 'leading:' line");
    leading_line_ = l.no;
    ExpressionScope scope;
    scope.partial_notation = false;
    Resolver r(m_, scope);
    ExprParser p = parser_at(l, 1, r);
    p.expect_op(":");
    while (true) {
      Token at = p.peek();
      Atom a = jet_argument(p, r, l);
      if (a.order() == 0) fail(l, at, "leading derivative must be a derivative, not the field itself");
      m_.leading.push_back(a);
      if (p.peek_op(",")) {
        p.skip();
        continue;
      }
      break;
    }
    if (p.peek().kind != Tok::end) p.fail(p.peek(), "unexpected '" + p.peek().text + "'");
  }

  void assume_statement(const SourceLine& l) {
    const Token& kind = l.toks[1];
    if (kind.kind != Tok::ident || kind.text != "nonzero") {
      fail(l, kind, "expected 'assume nonzero:'");
    }
    ExpressionScope scope;
    Resolver r(m_, scope);
    ExprParser p = parser_at(l, 2, r);
    p.expect_op(":");
    while (true) {
      Token at = p.peek();
      ast::NodePtr n = p.parse_expr();
      Expr e = ast::evaluate(n, r.context());
      if (e.is_constant()) fail(l, at, "a nonzero assumption must not be constant");
      m_.nonzero.push_back(n);
      if (p.peek_op(",")) {
        p.skip();
        continue;
      }
      break;
    }
    if (p.peek().kind != Tok::end) p.fail(p.peek(), "unexpected '" + p.peek().text + "'");
  }

  void max_order_statement(const SourceLine& l) {
    if (max_order_seen_) fail(l, l.toks[0], "duplicate 'max_order:' line");
    max_order_seen_ = true;
    if (!(l.toks[1].kind == Tok::op && l.toks[1].text == ":")) fail(l, l.toks[1], "expected ':'");
    const Token& n = l.toks[2];
    if (n.kind != Tok::number) fail(l, n, "expected a positive integer");
    if (l.toks[3].kind != Tok::end) fail(l, l.toks[3], "unexpected '" + l.toks[3].text + "'");
    long long v = std::stoll(n.text);
    if (v < 1 || v > 64) fail(l, n, "max_order must lie between 1 and 64");
    m_.max_order = static_cast<int>(v);
  }

  SourceSpan base_;
  std::vector<SourceLine> lines_;
  std::vector<ParseDiagnostic> diags_;
  ModelDef m_;
  int entropy_lines_ = 0;
  std::optional<int> leading_line_;
  bool max_order_seen_ = false;
  std::vector<int> equation_lines_;
  std::vector<int> constit_lines_;
  int last_line_ = 1;
};

}  // namespace

ParseResult parse_model(const std::string& text, const std::string& file) {
  try {
    return ModelParser(text, file).run();
  } catch (const std::exception& e) {
    ParseResult r;
    ParseDiagnostic d;
    d.message = std::string("internal parser failure: ") + e.what();
    d.span.file = file;
    r.diagnostics.push_back(d);
    return r;
  }
}

ParseResult parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    ParseDiagnostic d;
    d.message = "cannot open model file";
    d.span.file = path;
    r.diagnostics.push_back(d);
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

std::string format_model(const ModelDef& m) {
  std::ostringstream os;
  auto join = [](const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
  };
  os << "independent " << join(m.indep, " ") << "\n";
  os << "field " << join(m.fields, " ") << "\n";
  for (const auto& c : m.constit) {
    os << "constitutive " << c.name << "(" << join(c.labels(), ", ") << ")";
    if (!c.symmetric.empty()) {
      os << " symmetric";
      for (const auto& [a, b] : c.symmetric) {
        os << " (" << c.args[static_cast<std::size_t>(a)].str() << ", "
           << c.args[static_cast<std::size_t>(b)].str() << ")";
      }
    }
    os << "\n";
  }
  for (const auto& e : m.equations) {
    os << "equation " << e.label << ": " << ast::format(e.lhs, m.indep) << " = "
       << ast::format(e.rhs, m.indep) << "\n";
  }
  if (m.entropy_lhs) {
    os << "entropy: " << ast::format(m.entropy_lhs, m.indep) << " >= "
       << (m.entropy_rhs ? ast::format(m.entropy_rhs, m.indep) : "0") << "\n";
  }
  std::vector<std::string> leading;
  for (const auto& a : m.leading) leading.push_back(a.str());
  os << "leading: " << join(leading, ", ") << "\n";
  if (!m.nonzero.empty()) {
    std::vector<std::string> nz;
    for (const auto& n : m.nonzero) nz.push_back(ast::format(n, m.indep));
    os << "assume nonzero: " << join(nz, ", ") << "\n";
  }
  if (m.max_order != 4) os << "max_order: " << m.max_order << "\n";
  return os.str();
}

ExpressionResult parse_expression(const std::string& text, const ModelDef& m,
                                  const ExpressionScope& scope, const SourceSpan& origin) {
  ExpressionResult out;
  try {
    auto toks = lex(text, origin.col_start, origin, origin.line);
    Resolver r(m, scope);
    ExprParser p(toks, 0, r, origin, origin.line);
    ast::NodePtr n = p.parse_expr();
    if (p.peek().kind != Tok::end) p.fail(p.peek(), "unexpected '" + p.peek().text + "'");
    out.node = n;
  } catch (const ParseFailure& f) {
    out.diagnostics.push_back(f.diag);
  } catch (const std::exception& e) {
    ParseDiagnostic d;
    d.message = e.what();
    d.span = origin;
    out.diagnostics.push_back(d);
  }
  return out;
}

ModelBuilder& ModelBuilder::independent(const std::vector<std::string>& names) {
  std::string line = "independent";
  for (const auto& n : names) line += " " + n;
  lines_.push_back(line);
  return *this;
}

ModelBuilder& ModelBuilder::field(const std::vector<std::string>& names) {
  std::string line = "field";
  for (const auto& n : names) line += " " + n;
  lines_.push_back(line);
  return *this;
}

ModelBuilder& ModelBuilder::constitutive(const std::string& declaration) {
  lines_.push_back("constitutive " + declaration);
  return *this;
}

ModelBuilder& ModelBuilder::equation(const std::string& label, const std::string& lhs,
                                     const std::string& rhs) {
  lines_.push_back("equation " + label + ": " + lhs + " = " + rhs);
  return *this;
}

ModelBuilder& ModelBuilder::entropy(const std::string& lhs) {
  lines_.push_back("entropy: " + lhs + " >= 0");
  return *this;
}

ModelBuilder& ModelBuilder::leading(const std::vector<std::string>& derivatives) {
  std::string line = "leading:";
  for (std::size_t i = 0; i < derivatives.size(); ++i) line += (i ? ", " : " ") + derivatives[i];
  lines_.push_back(line);
  return *this;
}

ModelBuilder& ModelBuilder::assume_nonzero(const std::string& expr) {
  lines_.push_back("assume nonzero: " + expr);
  return *this;
}

ModelBuilder& ModelBuilder::max_order(int n) {
  lines_.push_back("max_order: " + std::to_string(n));
  return *this;
}

ModelDef ModelBuilder::build() const {
  std::string text;
  for (const auto& l : lines_) text += l + "\n";
  ParseResult r = parse_model(text, "<builder>");
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += (msg.empty() ? "" : "; ") + format_diagnostic(d);
    throw InvalidModel(msg);
  }
  return *r.model;
}

}  // namespace entropik
