#include "jkl/parser.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "jkl/error.hpp"
#include "jkl/io.hpp"

namespace jkl {
namespace {

enum class Tok { Ident, Number, Arrow, Plus, At, Colon, Equals };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
};

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_char(line[i])) ++i;
      out.push_back({Tok::Ident, line.substr(start, i - start), start + 1});
      continue;
    }
    if (c == '-' && i + 1 < n && line[i + 1] == '>') {
      i += 2;
      out.push_back({Tok::Arrow, line.substr(start, 2), start + 1});
      continue;
    }
    if (digit(c) || c == '.' || (c == '-' && i + 1 < n && (digit(line[i + 1]) || line[i + 1] == '.'))) {
      if (c == '-') ++i;
      bool any = false;
      while (i < n && digit(line[i])) ++i, any = true;
      if (i < n && line[i] == '.') {
        ++i;
        while (i < n && digit(line[i])) ++i, any = true;
      }
      if (!any) throw ParseError(lineno, start + 1, "malformed number");
      if (i < n && (line[i] == 'e' || line[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (line[j] == '+' || line[j] == '-')) ++j;
        if (j < n && digit(line[j])) {
          while (j < n && digit(line[j])) ++j;
          i = j;
        }
      }
      out.push_back({Tok::Number, line.substr(start, i - start), start + 1});
      continue;
    }
    switch (c) {
      case '+': out.push_back({Tok::Plus, line.substr(i, 1), i + 1}); break;
      case '@': out.push_back({Tok::At, line.substr(i, 1), i + 1}); break;
      case ':': out.push_back({Tok::Colon, line.substr(i, 1), i + 1}); break;
      case '=': out.push_back({Tok::Equals, line.substr(i, 1), i + 1}); break;
      default: {
        std::string what;
        if (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7f)
          what = std::string("unexpected character '") + c + "'";
        else {
          char buf[8];
          std::snprintf(buf, sizeof buf, "0x%02x", static_cast<unsigned char>(c));
          what = std::string("unexpected byte ") + buf;
        }
        throw ParseError(lineno, i + 1, what);
      }
    }
    ++i;
  }
  return out;
}

double parse_number(const Token& t, std::size_t lineno) {
  std::string_view s = t.text;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc::result_out_of_range)
    throw ParseError(lineno, t.column, "number out of range: " + std::string(t.text));
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(lineno, t.column, "malformed number: " + std::string(t.text));
  return v;
}

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

struct RawTerm {
  std::int64_t coeff;
  std::string_view species;
  std::size_t column;
};

class LineParser {
 public:
  LineParser(const Line& l) : line_(l) {}

  bool done() const { return pos_ >= line_.tokens.size(); }
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < line_.tokens.size() ? &line_.tokens[pos_ + ahead] : nullptr;
  }
  const Token& expect(Tok kind, const char* what) {
    const Token* t = peek();
    if (!t || t->kind != kind) fail(t, std::string("expected ") + what);
    ++pos_;
    return *t;
  }
  [[noreturn]] void fail(const Token* at, const std::string& msg) const {
    std::size_t col = at ? at->column : end_column();
    throw ParseError(line_.number, col, msg);
  }
  std::size_t end_column() const {
    if (line_.tokens.empty()) return 1;
    const auto& t = line_.tokens.back();
    return t.column + t.text.size();
  }
  void advance() { ++pos_; }

  std::vector<RawTerm> side() {
    std::vector<RawTerm> terms;
    const Token* t = peek();
    if (t && t->kind == Tok::Number && t->text == "0") {
      const Token* next = peek(1);
      if (!next || next->kind != Tok::Ident) {
        advance();
        return terms;
      }
    }
    while (true) {
      terms.push_back(term());
      const Token* p = peek();
      if (!p || p->kind != Tok::Plus) break;
      advance();
    }
    return terms;
  }

 private:
  RawTerm term() {
    const Token* t = peek();
    std::int64_t coeff = 1;
    std::size_t col = t ? t->column : end_column();
    if (t && t->kind == Tok::Number) {
      for (char c : t->text)
        if (!digit(c)) fail(t, "stoichiometric coefficient must be a non-negative integer");
      if (t->text.size() > 6) fail(t, "stoichiometric coefficient too large");
      coeff = std::stoll(std::string(t->text));
      if (coeff == 0) fail(t, "stoichiometric coefficient must be positive");
      advance();
    }
    const Token& id = expect(Tok::Ident, "species name");
    if (id.text == "species") fail(&id, "'species' is a reserved word");
    return {coeff, id.text, col};
  }

  const Line& line_;
  std::size_t pos_ = 0;
};

}  // namespace

ModelDocument parse_document(std::string_view text) {
  ModelDocument doc;
  doc.text = std::string(text);

  std::vector<Line> lines;
  {
    std::size_t lineno = 1, start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == '\n') {
        auto toks = tokenize(text.substr(start, i - start), lineno);
        if (!toks.empty()) lines.push_back({lineno, std::move(toks)});
        start = i + 1;
        ++lineno;
      }
    }
  }

  std::vector<std::string> species;
  std::map<std::string, double> params;
  std::map<std::string, std::size_t, std::less<>> species_idx;
  std::vector<const Line*> reaction_lines;

  // Pass 1: declarations.
  for (const auto& line : lines) {
    LineParser p(line);
    const Token& first = *p.peek();
    if (first.kind == Tok::Ident && first.text == "species") {
      p.advance();
      if (p.done()) p.fail(nullptr, "species declaration needs at least one name");
      while (!p.done()) {
        const Token& id = p.expect(Tok::Ident, "species name");
        if (id.text == "species") p.fail(&id, "'species' is a reserved word");
        std::string name(id.text);
        if (species_idx.count(name)) p.fail(&id, "duplicate species '" + name + "'");
        if (params.count(name)) p.fail(&id, "species '" + name + "' clashes with a parameter name");
        species_idx.emplace(name, species.size());
        species.push_back(name);
        doc.species_locations.push_back({line.number, id.column});
      }
      continue;
    }
    const Token* second = p.peek(1);
    if (first.kind == Tok::Ident && second && second->kind == Tok::Equals) {
      std::string name(first.text);
      p.advance();
      p.advance();
      const Token& num = p.expect(Tok::Number, "numeric parameter value");
      if (!p.done()) p.fail(p.peek(), "unexpected token after parameter value");
      if (params.count(name)) p.fail(&first, "duplicate parameter '" + name + "'");
      if (species_idx.count(name)) p.fail(&first, "parameter '" + name + "' clashes with a species name");
      params[name] = parse_number(num, line.number);
      doc.parameter_locations.push_back({name, {line.number, first.column}});
      continue;
    }
    reaction_lines.push_back(&line);
  }

  // Pass 2: reactions.
  std::vector<Reaction> reactions;
  std::set<std::string> labels;
  const std::size_t D = species.size();
  for (const Line* line : reaction_lines) {
    LineParser p(*line);
    Reaction rx;
    const Token* first = p.peek();
    const Token* second = p.peek(1);
    if (first->kind == Tok::Ident && second && second->kind == Tok::Colon) {
      rx.label = std::string(first->text);
      p.advance();
      p.advance();
    } else {
      rx.label = "R" + std::to_string(reactions.size() + 1);
    }
    if (!labels.insert(rx.label).second) p.fail(first, "duplicate reaction label '" + rx.label + "'");

    auto resolve = [&](const RawTerm& t) -> std::size_t {
      auto it = species_idx.find(t.species);
      if (it == species_idx.end())
        throw ParseError(line->number, t.column, "unknown species '" + std::string(t.species) + "'");
      return it->second;
    };

    const Token* lhs_tok = p.peek();
    auto lhs = p.side();
    p.expect(Tok::Arrow, "'->'");
    auto rhs = p.side();
    p.expect(Tok::At, "'@' followed by a rate");
    const Token* rate = p.peek();
    if (!rate) p.fail(nullptr, "missing rate after '@'");
    double k = 0.0;
    if (rate->kind == Tok::Number) {
      k = parse_number(*rate, line->number);
    } else if (rate->kind == Tok::Ident) {
      auto it = params.find(std::string(rate->text));
      if (it == params.end()) p.fail(rate, "unknown parameter '" + std::string(rate->text) + "'");
      k = it->second;
      rx.rate_parameter = it->first;
    } else {
      p.fail(rate, "rate must be a number or parameter name");
    }
    p.advance();
    if (!p.done()) p.fail(p.peek(), "unexpected token after rate");

    std::vector<std::int64_t> reactant(D, 0), product(D, 0);
    std::int64_t order = 0;
    for (const auto& t : lhs) {
      reactant[resolve(t)] += t.coeff;
      order += t.coeff;
    }
    for (const auto& t : rhs) product[resolve(t)] += t.coeff;
    if (order > 3) p.fail(lhs_tok, "reactant order " + std::to_string(order) + " exceeds the supported maximum of 3");

    std::vector<ReactantTerm> terms;
    rx.change.assign(D, 0);
    for (std::size_t s = 0; s < D; ++s) {
      rx.change[s] = reactant[s] - product[s];
      if (reactant[s] > 0) terms.push_back({s, static_cast<int>(reactant[s])});
    }
    rx.propensity = Propensity::mass_action(k, std::move(terms));
    reactions.push_back(std::move(rx));
    doc.reaction_locations.push_back({line->number, first->column});
  }

  doc.network = ReactionNetwork(std::move(species), std::move(reactions), std::move(params));
  return doc;
}

ReactionNetwork parse_model(std::string_view text) { return parse_document(text).network; }

std::string serialize_model(const ReactionNetwork& net) {
  std::ostringstream os;
  os << "# jkl reaction network\n";
  if (net.species_count() > 0) {
    os << "species";
    for (const auto& s : net.species()) os << ' ' << s;
    os << '\n';
  }
  for (const auto& [name, v] : net.parameters()) os << name << " = " << format_double(v) << '\n';

  auto side = [&](const std::vector<std::int64_t>& counts) {
    std::string out;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] == 0) continue;
      if (!out.empty()) out += " + ";
      if (counts[s] != 1) out += std::to_string(counts[s]) + " ";
      out += net.species()[s];
    }
    return out.empty() ? std::string("0") : out;
  };

  for (const auto& r : net.reactions()) {
    std::vector<std::int64_t> reactant(net.species_count(), 0), product(net.species_count(), 0);
    for (const auto& t : r.propensity.reactants()) reactant[t.species] = t.multiplicity;
    for (std::size_t s = 0; s < net.species_count(); ++s) {
      product[s] = reactant[s] - r.change[s];
      if (product[s] < 0)
        throw std::invalid_argument("reaction '" + r.label + "' has no reactant/product form");
    }
    os << r.label << ": " << side(reactant) << " -> " << side(product) << " @ "
       << (r.rate_parameter.empty() ? format_double(r.propensity.rate()) : r.rate_parameter) << '\n';
  }
  return os.str();
}

ReactionNetwork load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace jkl
