// Copyright 2026 The ProbPol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "probpol/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace probpol {
namespace {

enum class TokKind {
  Ident,
  Number,
  String,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Colon,
  Comma,
  Arrow,   // ->
  OPlus,   // (+)
  SeqOp,   // >>
  Eof,
};

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;  // ident text, string payload, or number lexeme
  double num = 0.0;
  Span span;
};

struct ParseError {
  Diagnostic diag;
};

[[noreturn]] void fail(const Span& span, const std::string& message) {
  throw ParseError{makeDiag(Severity::Error, "PP001", span, message)};
}

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipTrivia();
      Token t = next();
      bool eof = t.kind == TokKind::Eof;
      out.push_back(std::move(t));
      if (eof) break;
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  Span here(std::size_t length = 1) const {
    Span s;
    s.file = file_;
    s.line = line_;
    s.column = col_;
    s.offset = pos_;
    s.length = length;
    return s;
  }

  void skipTrivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else {
        break;
      }
    }
  }

  Token make(TokKind kind, Span span, std::string text = {}) {
    Token t;
    t.kind = kind;
    t.span = std::move(span);
    t.text = std::move(text);
    return t;
  }

  Token next() {
    if (pos_ >= src_.size()) return make(TokKind::Eof, here(0));
    Span start = here();
    char c = peek();

    if (c == '(') {
      if (peek(1) == '+' && peek(2) == ')') {
        advance();
        advance();
        advance();
        start.length = 3;
        return make(TokKind::OPlus, start);
      }
      advance();
      return make(TokKind::LParen, start);
    }
    if (c == ')') {
      advance();
      return make(TokKind::RParen, start);
    }
    if (c == '{') {
      advance();
      return make(TokKind::LBrace, start);
    }
    if (c == '}') {
      advance();
      return make(TokKind::RBrace, start);
    }
    if (c == '[') {
      advance();
      return make(TokKind::LBracket, start);
    }
    if (c == ']') {
      advance();
      return make(TokKind::RBracket, start);
    }
    if (c == ':') {
      advance();
      return make(TokKind::Colon, start);
    }
    if (c == ',') {
      advance();
      return make(TokKind::Comma, start);
    }
    if (c == '>' && peek(1) == '>') {
      advance();
      advance();
      start.length = 2;
      return make(TokKind::SeqOp, start);
    }
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      start.length = 2;
      return make(TokKind::Arrow, start);
    }
    if (c == '"') return lexString(start);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return lexNumber(start);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lexIdent(start);

    fail(start, std::string("unexpected character '") + c + "'");
  }

  Token lexString(Span start) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      char c = peek();
      if (c == '\0' || c == '\n') fail(start, "unterminated string literal");
      advance();
      if (c == '"') break;
      if (c == '\\') {
        char esc = peek();
        if (esc == '"' || esc == '\\') {
          value.push_back(esc);
          advance();
        } else {
          fail(here(), "unsupported escape sequence (only \\\" and \\\\)");
        }
      } else {
        value.push_back(c);
      }
    }
    start.length = pos_ - start.offset;
    Token t = make(TokKind::String, start, std::move(value));
    return t;
  }

  Token lexNumber(Span start) {
    std::string lex;
    if (peek() == '-') lex.push_back(advance());
    while (std::isdigit(static_cast<unsigned char>(peek()))) lex.push_back(advance());
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      lex.push_back(advance());
      while (std::isdigit(static_cast<unsigned char>(peek()))) lex.push_back(advance());
    }
    start.length = pos_ - start.offset;
    Token t = make(TokKind::Number, start, lex);
    t.num = std::strtod(lex.c_str(), nullptr);
    return t;
  }

  Token lexIdent(Span start) {
    std::string lex;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '.') {
      lex.push_back(advance());
    }
    start.length = pos_ - start.offset;
    return make(TokKind::Ident, start, std::move(lex));
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Program parseProgram() {
    Program prog;
    while (!at(TokKind::Eof)) {
      const Token& t = cur();
      if (t.kind != TokKind::Ident) fail(t.span, "expected a block keyword");
      if (t.text == "SIGNAL") {
        prog.signals.push_back(parseSignal());
      } else if (t.text == "ROUTE") {
        prog.routes.push_back(parseRoute());
      } else if (t.text == "SIGNAL_GROUP") {
        prog.groups.push_back(parseGroup());
      } else if (t.text == "TEST") {
        prog.tests.push_back(parseTest());
      } else if (t.text == "DECISION_TREE") {
        prog.trees.push_back(parseTree());
      } else if (t.text == "POLICY") {
        prog.policies.push_back(parsePolicy());
      } else if (t.text == "GLOBAL") {
        parseGlobal(prog);
      } else if (t.text == "PLUGIN" || t.text == "BACKEND") {
        prog.named_configs.push_back(parseNamedConfig());
      } else {
        fail(t.span, "unknown block keyword '" + t.text + "'");
      }
    }
    return prog;
  }

  Condition parseConditionToEof() {
    Condition c = parseOr();
    if (!at(TokKind::Eof)) fail(cur().span, "trailing input after condition");
    return c;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(std::size_t ahead = 1) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(TokKind kind) const { return cur().kind == kind; }
  bool atIdent(const char* word) const {
    return cur().kind == TokKind::Ident && cur().text == word;
  }

  Token take() { return tokens_[pos_++]; }

  Token expect(TokKind kind, const char* what) {
    if (!at(kind)) fail(cur().span, std::string("expected ") + what);
    return take();
  }

  Token expectIdent(const char* word) {
    if (!atIdent(word)) fail(cur().span, std::string("expected '") + word + "'");
    return take();
  }

  std::string expectName() {
    Token t = expect(TokKind::Ident, "an identifier");
    return t.text;
  }

  static Span spanBetween(const Span& from, const Span& to) {
    Span s = from;
    s.length = to.offset + to.length - from.offset;
    return s;
  }

  // --- config values ------------------------------------------------------

  ConfigValue parseConfigValue() {
    const Token& t = cur();
    switch (t.kind) {
      case TokKind::String:
        return ConfigValue::ofString(take().text);
      case TokKind::Number:
        return ConfigValue::ofNumber(take().num);
      case TokKind::Ident:
        return ConfigValue::ofString(take().text);
      case TokKind::LBracket: {
        take();
        std::vector<ConfigValue> items;
        if (!at(TokKind::RBracket)) {
          items.push_back(parseConfigValue());
          while (at(TokKind::Comma)) {
            take();
            items.push_back(parseConfigValue());
          }
        }
        expect(TokKind::RBracket, "']'");
        return ConfigValue::ofList(std::move(items));
      }
      case TokKind::LBrace:
        return ConfigValue::ofMap(parseConfigMap());
      default:
        fail(t.span, "expected a config value");
    }
  }

  ConfigMap parseConfigMap() {
    expect(TokKind::LBrace, "'{'");
    ConfigMap map;
    while (!at(TokKind::RBrace)) {
      Token key = expect(TokKind::Ident, "a config key");
      expect(TokKind::Colon, "':'");
      ConfigValue value = parseConfigValue();
      if (at(TokKind::Comma)) take();  // optional separator
      map[key.text] = std::move(value);
    }
    expect(TokKind::RBrace, "'}'");
    return map;
  }

  // --- conditions ---------------------------------------------------------

  Condition parseOr() {
    Condition lhs = parseAnd();
    while (atIdent("OR")) {
      take();
      Condition rhs = parseAnd();
      Span sp = spanBetween(lhs.span, rhs.span);
      lhs = Condition::disj(std::move(lhs), std::move(rhs));
      lhs.span = sp;
    }
    return lhs;
  }

  Condition parseAnd() {
    Condition lhs = parseUnary();
    while (atIdent("AND")) {
      take();
      Condition rhs = parseUnary();
      Span sp = spanBetween(lhs.span, rhs.span);
      lhs = Condition::conj(std::move(lhs), std::move(rhs));
      lhs.span = sp;
    }
    return lhs;
  }

  Condition parseUnary() {
    if (atIdent("NOT")) {
      Token nt = take();
      Condition operand = parseUnary();
      Span sp = spanBetween(nt.span, operand.span);
      Condition c = Condition::negate(std::move(operand));
      c.span = sp;
      return c;
    }
    if (at(TokKind::LParen)) {
      take();
      Condition inner = parseOr();
      expect(TokKind::RParen, "')'");
      return inner;
    }
    return parseAtom();
  }

  Condition parseAtom() {
    Token type = expect(TokKind::Ident, "a signal atom");
    if (!signalTypeFromName(type.text)) {
      fail(type.span, "unknown signal type '" + type.text + "' in condition");
    }
    expect(TokKind::LParen, "'(' after signal type");
    Token name = expect(TokKind::String, "a quoted signal name");
    Token close = expect(TokKind::RParen, "')'");
    return Condition::atom(type.text, name.text, spanBetween(type.span, close.span));
  }

  // --- actions ------------------------------------------------------------

  Action parseActionSpec() {
    if (atIdent("MODEL")) {
      take();
      Token m = expect(TokKind::String, "a quoted model name");
      return Action::modelAction(m.text);
    }
    if (atIdent("PLUGIN")) {
      take();
      std::string name = expectName();
      ConfigMap config;
      if (at(TokKind::LBrace)) config = parseConfigMap();
      return Action::pluginAction(std::move(name), std::move(config));
    }
    if (atIdent("BLOCK")) {
      take();
      return Action::blockAction();
    }
    fail(cur().span, "expected MODEL, PLUGIN, or BLOCK");
  }

  Action parseActionBody() {
    expect(TokKind::LBrace, "'{'");
    Action a = parseActionSpec();
    expect(TokKind::RBrace, "'}'");
    return a;
  }

  // --- blocks -------------------------------------------------------------

  SignalDecl parseSignal() {
    Token kw = take();  // SIGNAL
    Token type = expect(TokKind::Ident, "a signal type");
    auto st = signalTypeFromName(type.text);
    if (!st) fail(type.span, "unknown signal type '" + type.text + "'");
    SignalDecl s;
    s.type = *st;
    s.name = expectName();
    s.config = parseConfigMap();
    s.span = spanBetween(kw.span, tokens_[pos_ - 1].span);
    return s;
  }

  RouteDecl parseRoute() {
    Token kw = take();  // ROUTE
    RouteDecl r;
    r.name = expectName();
    expect(TokKind::LBrace, "'{'");
    bool have_priority = false, have_when = false, have_action = false;
    while (!at(TokKind::RBrace)) {
      if (atIdent("PRIORITY")) {
        Token p = take();
        if (!at(TokKind::Number)) fail(cur().span, "PRIORITY requires a number");
        Token n = take();
        if (n.num < 0 || n.num != std::floor(n.num)) {
          fail(n.span, "PRIORITY must be a non-negative integer");
        }
        r.priority = static_cast<int>(n.num);
        have_priority = true;
        (void)p;
      } else if (atIdent("TIER")) {
        take();
        if (!at(TokKind::Number)) fail(cur().span, "TIER requires a number");
        Token n = take();
        if (n.num < 0 || n.num != std::floor(n.num)) {
          fail(n.span, "TIER must be a non-negative integer");
        }
        r.tier = static_cast<int>(n.num);
      } else if (atIdent("WHEN")) {
        take();
        r.condition = parseOr();
        have_when = true;
      } else if (atIdent("MODEL") || atIdent("PLUGIN") || atIdent("BLOCK")) {
        r.action = parseActionSpec();
        have_action = true;
      } else {
        fail(cur().span, "unexpected token in ROUTE body");
      }
    }
    Token close = take();  // }
    if (!have_priority) fail(kw.span, "ROUTE '" + r.name + "' is missing PRIORITY");
    if (!have_when) fail(kw.span, "ROUTE '" + r.name + "' is missing a WHEN clause");
    if (!have_action) fail(kw.span, "ROUTE '" + r.name + "' is missing an action");
    r.span = spanBetween(kw.span, close.span);
    return r;
  }

  SignalGroupDecl parseGroup() {
    Token kw = take();  // SIGNAL_GROUP
    SignalGroupDecl g;
    g.name = expectName();
    Span body_start = cur().span;
    ConfigMap config = parseConfigMap();
    g.span = spanBetween(kw.span, tokens_[pos_ - 1].span);

    auto sem = config.find("semantics");
    if (sem == config.end() || sem->second.kind != ConfigValue::Kind::String) {
      fail(body_start, "SIGNAL_GROUP requires a 'semantics' field");
    }
    if (sem->second.str != "softmax_exclusive") {
      fail(body_start, "unknown SIGNAL_GROUP semantics '" + sem->second.str + "'");
    }
    g.semantics = sem->second.str;

    if (auto it = config.find("temperature"); it != config.end()) {
      if (it->second.kind != ConfigValue::Kind::Number) {
        fail(body_start, "'temperature' must be a number");
      }
      g.temperature = it->second.num;
    }
    if (auto it = config.find("threshold"); it != config.end()) {
      if (it->second.kind != ConfigValue::Kind::Number) {
        fail(body_start, "'threshold' must be a number");
      }
      g.threshold = it->second.num;
    }
    auto mem = config.find("members");
    if (mem == config.end() || mem->second.kind != ConfigValue::Kind::List ||
        mem->second.list.empty()) {
      fail(body_start, "SIGNAL_GROUP requires a non-empty 'members' list");
    }
    for (const auto& v : mem->second.list) {
      if (v.kind != ConfigValue::Kind::String) {
        fail(body_start, "'members' entries must be signal names");
      }
      g.members.push_back(v.str);
    }
    if (auto it = config.find("default"); it != config.end()) {
      if (it->second.kind != ConfigValue::Kind::String) {
        fail(body_start, "'default' must be a signal name");
      }
      g.default_member = it->second.str;
    }
    for (const auto& [key, _] : config) {
      if (key != "semantics" && key != "temperature" && key != "threshold" &&
          key != "members" && key != "default") {
        fail(body_start, "unknown SIGNAL_GROUP field '" + key + "'");
      }
    }
    return g;
  }

  TestDecl parseTest() {
    Token kw = take();  // TEST
    TestDecl t;
    t.name = expectName();
    expect(TokKind::LBrace, "'{'");
    while (!at(TokKind::RBrace)) {
      TestCase c;
      Token q = expect(TokKind::String, "a quoted query");
      c.query = q.text;
      expect(TokKind::Arrow, "'->'");
      Token route = expect(TokKind::Ident, "a route name");
      c.expected_route = route.text;
      c.span = spanBetween(q.span, route.span);
      t.cases.push_back(std::move(c));
    }
    Token close = take();
    if (t.cases.empty()) fail(kw.span, "TEST '" + t.name + "' has no cases");
    t.span = spanBetween(kw.span, close.span);
    return t;
  }

  DecisionTreeDecl parseTree() {
    Token kw = take();  // DECISION_TREE
    DecisionTreeDecl tree;
    tree.name = expectName();
    expect(TokKind::LBrace, "'{'");
    expectIdent("IF");
    {
      TreeBranch b;
      Span cs = cur().span;
      b.condition = parseOr();
      b.action = parseActionBody();
      b.span = spanBetween(cs, tokens_[pos_ - 1].span);
      tree.branches.push_back(std::move(b));
    }
    while (atIdent("ELSE")) {
      take();
      if (atIdent("IF")) {
        take();
        TreeBranch b;
        Span cs = cur().span;
        b.condition = parseOr();
        b.action = parseActionBody();
        b.span = spanBetween(cs, tokens_[pos_ - 1].span);
        tree.branches.push_back(std::move(b));
      } else {
        tree.else_action = parseActionBody();
        break;
      }
    }
    Token close = expect(TokKind::RBrace, "'}'");
    tree.span = spanBetween(kw.span, close.span);
    return tree;
  }

  // POLICY expr grammar: seq := union (">>" union)*;
  // union := primary ("(+)" primary)*; primary := leaf | policy-ref.
  // A leaf starts with NOT or a signal atom; a bare identifier is a
  // reference to an earlier POLICY.
  AlgebraExpr parseAlgebraExpr() {
    AlgebraExpr lhs = parseAlgebraUnion();
    while (at(TokKind::SeqOp)) {
      take();
      AlgebraExpr rhs = parseAlgebraUnion();
      lhs = AlgebraExpr::sequential(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  AlgebraExpr parseAlgebraUnion() {
    AlgebraExpr lhs = parseAlgebraPrimary();
    while (at(TokKind::OPlus)) {
      take();
      AlgebraExpr rhs = parseAlgebraPrimary();
      lhs = AlgebraExpr::exclusiveUnion(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  AlgebraExpr parseAlgebraPrimary() {
    if (cur().kind == TokKind::Ident && !atIdent("NOT") && peek().kind != TokKind::LParen) {
      Token ref = take();
      AlgebraExpr e = AlgebraExpr::ref(ref.text);
      e.span = ref.span;
      return e;
    }
    Span cs = cur().span;
    Condition cond = parseOr();
    expect(TokKind::Arrow, "'->'");
    Action action;
    if (at(TokKind::String)) {
      action = Action::modelAction(take().text);
    } else if (atIdent("BLOCK")) {
      take();
      action = Action::blockAction();
    } else if (atIdent("PLUGIN")) {
      take();
      std::string name = expectName();
      ConfigMap config;
      if (at(TokKind::LBrace)) config = parseConfigMap();
      action = Action::pluginAction(std::move(name), std::move(config));
    } else {
      fail(cur().span, "expected a model string, PLUGIN, or BLOCK after '->'");
    }
    AlgebraExpr e = AlgebraExpr::leaf(std::move(cond), std::move(action));
    e.span = spanBetween(cs, tokens_[pos_ - 1].span);
    return e;
  }

  PolicyDecl parsePolicy() {
    Token kw = take();  // POLICY
    PolicyDecl p;
    p.name = expectName();
    expect(TokKind::LBrace, "'{'");
    p.expr = parseAlgebraExpr();
    Token close = expect(TokKind::RBrace, "'}'");
    p.span = spanBetween(kw.span, close.span);
    return p;
  }

  void parseGlobal(Program& prog) {
    take();  // GLOBAL
    ConfigMap config = parseConfigMap();
    for (auto& [k, v] : config) prog.global[k] = std::move(v);
  }

  NamedConfigDecl parseNamedConfig() {
    Token kw = take();  // PLUGIN or BACKEND
    NamedConfigDecl d;
    d.keyword = kw.text;
    d.name = expectName();
    d.config = parseConfigMap();
    d.span = spanBetween(kw.span, tokens_[pos_ - 1].span);
    return d;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse(std::string_view source, const std::string& file) {
  ParseResult result;
  try {
    Lexer lexer(source, file);
    Parser parser(lexer.run());
    result.program = parser.parseProgram();
  } catch (const ParseError& e) {
    result.program = Program{};
    result.diagnostics.push_back(e.diag);
  }
  return result;
}

ParseResult parseConditionOnly(std::string_view source, Condition* out) {
  ParseResult result;
  try {
    Lexer lexer(source, "<condition>");
    Parser parser(lexer.run());
    *out = parser.parseConditionToEof();
  } catch (const ParseError& e) {
    result.diagnostics.push_back(e.diag);
  }
  return result;
}

}  // namespace probpol
