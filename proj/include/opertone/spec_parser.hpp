#pragma once
// One-line function-spec grammar:
//   spec     := builtin | rep
//   builtin  := ("id"|"log"|"inv"|"exp"|"pow" REAL|"const" REAL) "on" interval
//   rep      := ("ktone" INT | "monotone" | "decreasing" | "convex")
//               ["on" interval] ["alpha" REAL] ["beta" REAL] ["gamma" REAL]
//               ["poly" "[" REAL ("," REAL)* "]"]
//               ["atoms" "[" [pair ("," pair)*] "]"]   pair := "(" REAL "," REAL ")"
//   interval := "(" (REAL|"-inf") "," (REAL|"inf") ")"
// Syntax errors carry line/column; constraint violations name the field.

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "opertone/function_spec.hpp"

namespace opertone {

namespace detail {

struct SpecToken {
  enum Kind { Word, Number, LParen, RParen, LBracket, RBracket, Comma, End } kind;
  std::string text;
  double num = 0.0;
  int col = 0;
};

inline std::vector<SpecToken> spec_tokenize(const std::string& text) {
  std::vector<SpecToken> toks;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') { toks.push_back({SpecToken::LParen, "(", 0, col}); ++i; continue; }
    if (c == ')') { toks.push_back({SpecToken::RParen, ")", 0, col}); ++i; continue; }
    if (c == '[') { toks.push_back({SpecToken::LBracket, "[", 0, col}); ++i; continue; }
    if (c == ']') { toks.push_back({SpecToken::RBracket, "]", 0, col}); ++i; continue; }
    if (c == ',') { toks.push_back({SpecToken::Comma, ",", 0, col}); ++i; continue; }
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'i' && c != 'n') {
      // words never start with 'i'/'n' except "inf"/"nan", handled as numbers
      size_t j = i;
      while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      toks.push_back({SpecToken::Word, text.substr(i, j - i), 0, col});
      i = j;
      continue;
    }
    // try a number (handles "inf", "-inf", digits, scientific notation)
    const char* start = text.c_str() + i;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end != start) {
      if (std::isnan(v)) throw SpecParseError("nan is not a valid number", 1, col);
      toks.push_back({SpecToken::Number, std::string(start, end), v, col});
      i += static_cast<size_t>(end - start);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {  // 'i'/'n' word that was not inf/nan
      size_t j = i;
      while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      toks.push_back({SpecToken::Word, text.substr(i, j - i), 0, col});
      i = j;
      continue;
    }
    throw SpecParseError(std::string("unexpected character '") + c + "'", 1, col);
  }
  toks.push_back({SpecToken::End, "", 0, static_cast<int>(text.size()) + 1});
  return toks;
}

class SpecParser {
 public:
  explicit SpecParser(const std::string& text) : toks_(spec_tokenize(text)) {}

  FunctionSpec parse() {
    const SpecToken head = expect(SpecToken::Word, "function name");
    FunctionSpec f = parse_body(head);
    if (cur().kind != SpecToken::End)
      throw SpecParseError("trailing input '" + cur().text + "'", 1, cur().col);
    return f;
  }

 private:
  const SpecToken& cur() const { return toks_[pos_]; }
  const SpecToken& advance() { return toks_[pos_++]; }

  const SpecToken& expect(SpecToken::Kind k, const std::string& what) {
    if (cur().kind != k)
      throw SpecParseError("expected " + what + ", got '" + cur().text + "'", 1, cur().col);
    return advance();
  }

  bool accept_word(const std::string& w) {
    if (cur().kind == SpecToken::Word && cur().text == w) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expect_number(const std::string& what) {
    return expect(SpecToken::Number, what).num;
  }

  Interval parse_interval() {
    expect(SpecToken::LParen, "'('");
    const double a = expect_number("interval endpoint");
    expect(SpecToken::Comma, "','");
    const double b = expect_number("interval endpoint");
    expect(SpecToken::RParen, "')'");
    if (!(a < b)) throw SpecParseError("interval requires a < b", 1, cur().col);
    return {a, b};
  }

  std::vector<double> parse_real_list() {
    expect(SpecToken::LBracket, "'['");
    std::vector<double> vals;
    if (cur().kind != SpecToken::RBracket) {
      vals.push_back(expect_number("coefficient"));
      while (cur().kind == SpecToken::Comma) {
        ++pos_;
        vals.push_back(expect_number("coefficient"));
      }
    }
    expect(SpecToken::RBracket, "']'");
    return vals;
  }

  std::vector<Atom> parse_atoms() {
    expect(SpecToken::LBracket, "'['");
    std::vector<Atom> atoms;
    if (cur().kind != SpecToken::RBracket) {
      atoms.push_back(parse_pair());
      while (cur().kind == SpecToken::Comma) {
        ++pos_;
        atoms.push_back(parse_pair());
      }
    }
    expect(SpecToken::RBracket, "']'");
    return atoms;
  }

  Atom parse_pair() {
    expect(SpecToken::LParen, "'('");
    const double w = expect_number("atom weight");
    expect(SpecToken::Comma, "','");
    const double l = expect_number("atom node");
    expect(SpecToken::RParen, "')'");
    return {w, l};
  }

  FunctionSpec parse_body(const SpecToken& head) {
    const std::string& name = head.text;
    const int head_col = head.col;
    auto constraint = [&](const Error& e) -> SpecParseError {
      return SpecParseError(e.what(), 1, head_col);
    };

    if (name == "id" || name == "log" || name == "inv" || name == "exp" || name == "pow" ||
        name == "const") {
      double param = 0.0;
      if (name == "pow" || name == "const") param = expect_number("parameter");
      if (!accept_word("on"))
        throw SpecParseError("expected 'on' after builtin name", 1, cur().col);
      const Interval dom = parse_interval();
      try {
        if (name == "id") return FunctionSpec::id(dom);
        if (name == "log") return FunctionSpec::builtin(BuiltinKind::Log, 0, dom);
        if (name == "inv") return FunctionSpec::builtin(BuiltinKind::Inv, 0, dom);
        if (name == "exp") return FunctionSpec::exp(dom);
        if (name == "pow") return FunctionSpec::pow(param, dom);
        return FunctionSpec::constant(param, dom);
      } catch (const SpecParseError&) {
        throw;
      } catch (const Error& e) {
        throw constraint(e);
      }
    }

    if (name == "ktone" || name == "monotone" || name == "decreasing" || name == "convex") {
      int l = 0;
      if (name == "ktone") {
        const double lv = expect_number("tone order");
        l = static_cast<int>(lv);
        if (lv != l || l < 1)
          throw SpecParseError("field l: tone order must be a positive integer", 1, cur().col);
      }
      const Interval canonical = (name == "ktone") ? Interval::unit() : Interval::positive();
      if (accept_word("on")) {
        const int col = cur().col;
        const Interval given = parse_interval();
        if (given.a != canonical.a || given.b != canonical.b)
          throw SpecParseError("field domain: " + name + " representation lives on " +
                                   canonical.print(),
                               1, col);
      }
      double alpha = 0.0, beta = 0.0, gamma = 0.0;
      std::vector<double> poly;
      std::vector<Atom> atoms;
      if (accept_word("alpha")) alpha = expect_number("alpha");
      if (accept_word("beta")) beta = expect_number("beta");
      if (accept_word("gamma")) gamma = expect_number("gamma");
      if (accept_word("poly")) poly = parse_real_list();
      if (accept_word("atoms")) atoms = parse_atoms();
      try {
        if (name == "ktone") {
          if (alpha != 0 || beta != 0 || gamma != 0)
            throw Error("FunctionSpec: field alpha/beta/gamma: not part of a ktone representation");
          return FunctionSpec::ktone_rep(l, std::move(poly), std::move(atoms));
        }
        if (!poly.empty())
          throw Error("FunctionSpec: field poly: only ktone representations carry a polynomial part");
        if (name == "monotone") {
          if (gamma != 0) throw Error("FunctionSpec: field gamma: not part of a monotone representation");
          return FunctionSpec::monotone_rep(alpha, beta, std::move(atoms));
        }
        if (name == "decreasing") {
          if (gamma != 0) throw Error("FunctionSpec: field gamma: not part of a decreasing representation");
          return FunctionSpec::decreasing_rep(alpha, beta, std::move(atoms));
        }
        return FunctionSpec::convex_rep(alpha, beta, gamma, std::move(atoms));
      } catch (const SpecParseError&) {
        throw;
      } catch (const Error& e) {
        throw constraint(e);
      }
    }

    throw SpecParseError("unknown function name '" + name + "'", 1, head.col);
  }

  std::vector<SpecToken> toks_;
  size_t pos_ = 0;
};

}  // namespace detail

/// Total on the grammar above; parse(print(spec)) round-trips structurally.
inline FunctionSpec parse_spec(const std::string& text) {
  return detail::SpecParser(text).parse();
}

}  // namespace opertone
