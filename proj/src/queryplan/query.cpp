#include "ced/queryplan/query.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "ced/common/error.hpp"

namespace ced::queryplan {

std::string_view agg_name(AggFn fn) { return fn == AggFn::kCount ? "count" : "max_value"; }

std::string_view op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kLt: return "<";
    case CompareOp::kGt: return ">";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGe: return ">=";
  }
  return "?";
}

bool Predicate::matches(const tsstore::Value& v) const {
  auto c = tsstore::compare_values(v, literal);
  if (!c) return false;
  switch (op) {
    case CompareOp::kEq: return *c == 0;
    case CompareOp::kLt: return *c < 0;
    case CompareOp::kGt: return *c > 0;
    case CompareOp::kLe: return *c <= 0;
    case CompareOp::kGe: return *c >= 0;
  }
  return false;
}

namespace {

enum class Tok { kIdent, kNumber, kDuration, kString, kSymbol, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      out.push_back({Tok::kIdent, std::string(s.substr(start, i - start)), start});
    } else if (digit(c) || ((c == '-' || c == '.') && i + 1 < s.size() && (digit(s[i + 1]) || s[i + 1] == '.'))) {
      ++i;
      while (i < s.size() && (digit(s[i]) || s[i] == '.')) ++i;
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E') && i + 1 < s.size() &&
          (digit(s[i + 1]) || ((s[i + 1] == '-' || s[i + 1] == '+') && i + 2 < s.size() && digit(s[i + 2])))) {
        i += 2;
        while (i < s.size() && digit(s[i])) ++i;
      }
      if (i < s.size() && ident_start(s[i])) {
        while (i < s.size() && ident_char(s[i])) ++i;
        out.push_back({Tok::kDuration, std::string(s.substr(start, i - start)), start});
      } else {
        out.push_back({Tok::kNumber, std::string(s.substr(start, i - start)), start});
      }
    } else if (c == '\'') {
      std::string text;
      ++i;
      for (;;) {
        if (i >= s.size()) throw SyntaxError(start, "unterminated string literal");
        if (s[i] == '\'') {
          if (i + 1 < s.size() && s[i + 1] == '\'') {
            text += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        text += s[i++];
      }
      out.push_back({Tok::kString, std::move(text), start});
    } else if ((c == '<' || c == '>' || c == '!') && i + 1 < s.size() && s[i + 1] == '=') {
      i += 2;
      out.push_back({Tok::kSymbol, std::string(s.substr(start, 2)), start});
    } else if (std::string_view("(),.;=<>*").find(c) != std::string_view::npos) {
      ++i;
      out.push_back({Tok::kSymbol, std::string(1, c), start});
    } else {
      throw SyntaxError(start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

bool is_keyword(const Token& t, std::string_view kw) { return t.kind == Tok::kIdent && lower(t.text) == kw; }

bool reserved(const Token& t) {
  static constexpr std::string_view kWords[] = {"select", "from", "where", "group", "by", "and", "or", "not",
                                                "order",  "limit", "join", "on",   "having"};
  auto l = lower(t.text);
  return t.kind == Tok::kIdent && std::find(std::begin(kWords), std::end(kWords), l) != std::end(kWords);
}

[[noreturn]] void unsupported(const Token& t, const std::string& what) {
  throw CedError(ErrorCode::kUnsupportedFeature, what + " at offset " + std::to_string(t.pos));
}

class Parser {
 public:
  explicit Parser(std::string_view sql) : toks_(lex(sql)) {}

  Query run() {
    Query q;
    expect_keyword("select");
    q.select.push_back(select_item());
    while (accept_symbol(",")) q.select.push_back(select_item());
    expect_keyword("from");
    q.source = path();
    if (is_keyword(peek(), "join") || accept_symbol(",")) unsupported(peek(), "joins are not supported");
    if (accept_keyword("where")) {
      q.where = predicate();
      if (is_keyword(peek(), "and") || is_keyword(peek(), "or")) unsupported(peek(), "compound predicates");
    }
    if (accept_keyword("group")) {
      expect_keyword("by");
      q.group_by_ms = duration();
    }
    for (auto kw : {"order", "limit", "having", "fill", "align"}) {
      if (is_keyword(peek(), kw)) unsupported(peek(), lower(peek().text) + " clause");
    }
    accept_symbol(";");
    if (peek().kind != Tok::kEnd) throw SyntaxError(peek().pos, "unexpected '" + peek().text + "'");

    bool any_agg = false, any_plain = false;
    for (const auto& it : q.select) (it.agg ? any_agg : any_plain) = true;
    if (any_agg && any_plain) unsupported(toks_.front(), "mixing aggregate and plain select items");
    if (any_agg && !q.group_by_ms) unsupported(toks_.front(), "aggregation without GROUP BY");
    if (!any_agg && q.group_by_ms) unsupported(toks_.front(), "GROUP BY without aggregates");
    if (q.group_by_ms && q.where) unsupported(toks_.front(), "WHERE combined with GROUP BY");
    return q;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(peek(), kw)) return false;
    ++i_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) throw SyntaxError(peek().pos, "expected " + lower(kw));
  }
  bool accept_symbol(std::string_view s) {
    if (peek().kind != Tok::kSymbol || peek().text != s) return false;
    ++i_;
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) throw SyntaxError(peek().pos, "expected '" + std::string(s) + "'");
  }

  std::string identifier(std::string_view what) {
    const auto& t = peek();
    if (t.kind != Tok::kIdent || reserved(t)) throw SyntaxError(t.pos, "expected " + std::string(what));
    ++i_;
    return t.text;
  }

  SelectItem select_item() {
    if (peek().kind == Tok::kSymbol && peek().text == "*") unsupported(peek(), "wildcard select");
    const auto& head = peek();
    auto name = identifier("sensor or aggregate");
    if (!accept_symbol("(")) return {name, std::nullopt};
    auto fn = lower(name);
    std::optional<AggFn> agg;
    if (fn == "count") agg = AggFn::kCount;
    else if (fn == "max_value") agg = AggFn::kMaxValue;
    else unsupported(head, "aggregate function " + name);
    auto sensor = identifier("sensor");
    expect_symbol(")");
    return {sensor, agg};
  }

  std::string path() {
    auto out = identifier("source path");
    while (accept_symbol(".")) out += "." + identifier("path segment");
    return out;
  }

  Predicate predicate() {
    Predicate p;
    p.sensor = identifier("sensor");
    const auto& op = peek();
    if (op.kind != Tok::kSymbol) throw SyntaxError(op.pos, "expected comparison operator");
    if (op.text == "=") p.op = CompareOp::kEq;
    else if (op.text == "<") p.op = CompareOp::kLt;
    else if (op.text == ">") p.op = CompareOp::kGt;
    else if (op.text == "<=") p.op = CompareOp::kLe;
    else if (op.text == ">=") p.op = CompareOp::kGe;
    else if (op.text == "!=") unsupported(op, "operator !=");
    else throw SyntaxError(op.pos, "expected comparison operator");
    ++i_;
    p.literal = literal();
    return p;
  }

  tsstore::Value literal() {
    const auto& t = take();
    if (t.kind == Tok::kString) return t.text;
    if (t.kind == Tok::kIdent) {
      auto l = lower(t.text);
      if (l == "true") return true;
      if (l == "false") return false;
    }
    if (t.kind != Tok::kNumber) throw SyntaxError(t.pos, "expected literal");
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (t.text.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && ptr == e) return v;
    } else {
      double v = 0;
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && ptr == e) return v;
    }
    throw SyntaxError(t.pos, "malformed number '" + t.text + "'");
  }

  std::int64_t duration() {
    const auto& t = take();
    if (t.kind != Tok::kDuration) throw SyntaxError(t.pos, "expected duration such as 5m");
    auto split = t.text.find_first_not_of("0123456789");
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + split, n);
    if (ec != std::errc() || split == 0 || n <= 0) throw SyntaxError(t.pos, "bad duration '" + t.text + "'");
    auto unit = lower(std::string_view(t.text).substr(split));
    std::int64_t scale = 0;
    if (unit == "ms") scale = 1;
    else if (unit == "s") scale = 1000;
    else if (unit == "m") scale = 60'000;
    else if (unit == "h") scale = 3'600'000;
    else if (unit == "d") scale = 86'400'000;
    else throw SyntaxError(t.pos + split, "unknown duration unit '" + unit + "'");
    return n * scale;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

std::string render_duration(std::int64_t ms) {
  struct Unit {
    std::int64_t scale;
    const char* suffix;
  };
  for (auto u : {Unit{86'400'000, "d"}, Unit{3'600'000, "h"}, Unit{60'000, "m"}, Unit{1000, "s"}}) {
    if (ms % u.scale == 0) return std::to_string(ms / u.scale) + u.suffix;
  }
  return std::to_string(ms) + "ms";
}

}  // namespace

Query parse(std::string_view sql) { return Parser(sql).run(); }

std::string render_literal(const tsstore::Value& v) {
  using tsstore::DataType;
  switch (tsstore::type_of(v)) {
    case DataType::kText: {
      std::string out = "'";
      for (char c : std::get<std::string>(v)) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
    case DataType::kDouble: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
      std::string s(buf, ptr);
      if (s.find_first_of(".e") == std::string::npos) s += ".0";
      return s;
    }
    default:
      return tsstore::to_string(v);
  }
}

std::string render(const Query& q) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i) out += ", ";
    const auto& it = q.select[i];
    out += it.agg ? std::string(agg_name(*it.agg)) + "(" + it.sensor + ")" : it.sensor;
  }
  out += " FROM " + q.source;
  if (q.where) {
    out += " WHERE " + q.where->sensor + std::string(op_symbol(q.where->op)) + render_literal(q.where->literal);
  }
  if (q.group_by_ms) out += " GROUP BY " + render_duration(*q.group_by_ms);
  return out;
}

}  // namespace ced::queryplan
