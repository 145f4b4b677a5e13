#include "trustplan/planning/model_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace trustplan::planning {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
              c == '-';
    if (!ok) return false;
  }
  return true;
}

namespace {

enum class TokenKind { Word, LBrace, RBrace, Colon, Comma, End };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
         c == '.' || c == '/';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++column;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '{': kind = TokenKind::LBrace; break;
      case '}': kind = TokenKind::RBrace; break;
      case ':': kind = TokenKind::Colon; break;
      case ',': kind = TokenKind::Comma; break;
      default: kind = TokenKind::Word; break;
    }
    if (kind != TokenKind::Word) {
      tokens.push_back({kind, std::string(1, c), line, column});
      ++column;
      ++i;
      continue;
    }
    if (!is_word_char(c)) {
      throw ParseError(line, column, std::string("unexpected character '") + c + "'");
    }
    std::size_t start = i;
    std::size_t start_col = column;
    while (i < text.size() && is_word_char(text[i])) {
      ++i;
      ++column;
    }
    tokens.push_back({TokenKind::Word, std::string(text.substr(start, i - start)), line, start_col});
  }
  tokens.push_back({TokenKind::End, "", line, column});
  return tokens;
}

bool is_section_keyword(const Token& t) {
  return t.kind == TokenKind::Word && (t.text == "fluents" || t.text == "action" || t.text == "init" ||
                                       t.text == "goal");
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  PlanningModel parse() {
    PlanningModel model;
    bool seen_init = false;
    bool seen_goal = false;
    while (peek().kind != TokenKind::End) {
      const Token& t = peek();
      if (t.kind != TokenKind::Word) fail(t, "expected a section keyword");
      if (t.text == "fluents") {
        next();
        expect(TokenKind::Colon, "':' after 'fluents'");
        while (peek().kind == TokenKind::Word && !is_section_keyword(peek())) {
          model.fluents.insert(name(next()));
          if (peek().kind == TokenKind::Comma) next();
        }
      } else if (t.text == "action") {
        next();
        model.actions.push_back(parse_action());
      } else if (t.text == "init") {
        if (seen_init) fail(t, "duplicate 'init' section");
        seen_init = true;
        next();
        model.init = parse_set();
      } else if (t.text == "goal") {
        if (seen_goal) fail(t, "duplicate 'goal' section");
        seen_goal = true;
        next();
        model.goal = parse_set();
      } else {
        fail(t, "unknown section '" + t.text + "'");
      }
    }
    return normalize_model(std::move(model));
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] static void fail(const Token& t, const std::string& message) {
    throw ParseError(t.line, t.column, message);
  }

  const Token& expect(TokenKind kind, const std::string& what) {
    const Token& t = peek();
    if (t.kind != kind) fail(t, "expected " + what);
    return next();
  }

  static std::string name(const Token& t) {
    if (t.kind != TokenKind::Word || !is_valid_name(t.text)) fail(t, "invalid name '" + t.text + "'");
    if (is_section_keyword(t)) fail(t, "reserved word '" + t.text + "' used as a name");
    return t.text;
  }

  FluentSet parse_set() {
    expect(TokenKind::LBrace, "'{'");
    FluentSet out;
    while (peek().kind != TokenKind::RBrace) {
      if (peek().kind == TokenKind::End) fail(peek(), "unterminated '{'");
      if (peek().kind == TokenKind::Comma) {
        next();
        continue;
      }
      out.insert(name(next()));
    }
    next();
    return out;
  }

  ActionSchema parse_action() {
    ActionSchema action;
    action.name = name(expect(TokenKind::Word, "action name"));
    const Token& kw = expect(TokenKind::Word, "'cost'");
    if (kw.text != "cost") fail(kw, "expected 'cost'");
    const Token& num = expect(TokenKind::Word, "cost value");
    try {
      action.cost = parse_rational(num.text);
    } catch (const std::exception& e) {
      fail(num, e.what());
    }
    if (action.cost < 0) fail(num, "negative cost");
    std::optional<FluentSet> pre, add, del;
    while (peek().kind == TokenKind::Word && !is_section_keyword(peek())) {
      const Token& part = next();
      std::optional<FluentSet>* slot = nullptr;
      if (part.text == "pre") slot = &pre;
      else if (part.text == "add") slot = &add;
      else if (part.text == "del") slot = &del;
      else fail(part, "expected 'pre', 'add' or 'del'");
      if (slot->has_value()) fail(part, "duplicate '" + part.text + "' in action '" + action.name + "'");
      *slot = parse_set();
    }
    action.pre = pre.value_or(FluentSet{});
    action.add = add.value_or(FluentSet{});
    action.del = del.value_or(FluentSet{});
    return action;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void write_set(std::ostream& out, const FluentSet& set) {
  out << '{';
  bool first = true;
  for (const auto& f : set) {
    if (!first) out << ' ';
    out << f;
    first = false;
  }
  out << '}';
}

}  // namespace

PlanningModel parse_model(std::string_view text) { return Parser(tokenize(text)).parse(); }

PlanningModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_model(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path.string() + ": " + e.message());
  }
}

std::string serialize_model(const PlanningModel& model) {
  std::ostringstream out;
  out << "fluents:";
  for (const auto& f : model.fluents) out << ' ' << f;
  out << '\n';
  for (const auto& a : model.actions) {
    out << "action " << a.name << " cost " << format_rational(a.cost) << " pre ";
    write_set(out, a.pre);
    out << " add ";
    write_set(out, a.add);
    out << " del ";
    write_set(out, a.del);
    out << '\n';
  }
  out << "init ";
  write_set(out, model.init);
  out << "\ngoal ";
  write_set(out, model.goal);
  out << '\n';
  return out.str();
}

}  // namespace trustplan::planning
