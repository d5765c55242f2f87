// Line-oriented network description format:
//
//   species X Y            dynamic species
//   const A = 10           chemostatted species with fixed copy number
//   reaction A + 2 X -> 3 X : 0.5
//   reaction X -> 0 : 1e-3
//   pair 0 1               reactions 0 and 1 are each other's reverse
//
// '#' starts a comment. Identifiers match [A-Za-z][A-Za-z0-9_]*.

#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "paththerm/error.hpp"
#include "paththerm/network.hpp"

namespace paththerm {

namespace {

struct Token {
  enum class Kind { identifier, number, arrow, plus, colon, equals, end } kind = Kind::end;
  std::string text;
  std::size_t column = 0;  // 1-based
};

class LineScanner {
 public:
  LineScanner(std::string_view line, std::size_t line_number) : line_(line), line_number_(line_number) {}

  Token next() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    Token token;
    token.column = pos_ + 1;
    if (pos_ >= line_.size()) return token;
    const char c = line_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_')) {
        ++pos_;
      }
      token.kind = Token::Kind::identifier;
      token.text = std::string(line_.substr(start, pos_ - start));
      return token;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      if (c == '-' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
        pos_ += 2;
        token.kind = Token::Kind::arrow;
        token.text = "->";
        return token;
      }
      const std::size_t start = pos_;
      if (c == '-') ++pos_;
      while (pos_ < line_.size() &&
             (std::isdigit(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '.')) {
        ++pos_;
      }
      // Exponent, only when followed by a digit or sign: keeps "2X" as 2 and X.
      if (pos_ < line_.size() && (line_[pos_] == 'e' || line_[pos_] == 'E')) {
        std::size_t look = pos_ + 1;
        if (look < line_.size() && (line_[look] == '+' || line_[look] == '-')) ++look;
        if (look < line_.size() && std::isdigit(static_cast<unsigned char>(line_[look]))) {
          pos_ = look;
          while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        }
      }
      token.kind = Token::Kind::number;
      token.text = std::string(line_.substr(start, pos_ - start));
      return token;
    }
    ++pos_;
    switch (c) {
      case '+': token.kind = Token::Kind::plus; break;
      case ':': token.kind = Token::Kind::colon; break;
      case '=': token.kind = Token::Kind::equals; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", line_number_, token.column);
    }
    token.text = std::string(1, c);
    return token;
  }

  Token peek() {
    const std::size_t saved = pos_;
    Token token = next();
    pos_ = saved;
    return token;
  }

 private:
  std::string_view line_;
  std::size_t line_number_;
  std::size_t pos_ = 0;
};

std::int64_t parse_integer(const Token& token, std::size_t line) {
  std::int64_t value = 0;
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError("expected an integer, got '" + token.text + "'", line, token.column);
  return value;
}

double parse_real(const Token& token, std::size_t line) {
  double value = 0.0;
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError("expected a number, got '" + token.text + "'", line, token.column);
  return value;
}

struct PendingTerm {
  std::string name;
  std::int64_t coefficient = 1;
  std::size_t column = 0;
};

struct PendingReaction {
  std::vector<PendingTerm> reactants;
  std::vector<PendingTerm> products;
  double rate = 0.0;
  std::size_t line = 0;
};

std::vector<PendingTerm> parse_side(LineScanner& scanner, std::size_t line, Token::Kind terminator) {
  std::vector<PendingTerm> terms;
  Token token = scanner.next();
  if (token.kind == Token::Kind::number && token.text == "0") {
    const Token after = scanner.peek();
    if (after.kind == terminator) return terms;
  }
  while (true) {
    PendingTerm term;
    term.column = token.column;
    if (token.kind == Token::Kind::number) {
      term.coefficient = parse_integer(token, line);
      if (term.coefficient < 1) throw ParseError("stoichiometric coefficient must be positive", line, token.column);
      token = scanner.next();
    }
    if (token.kind != Token::Kind::identifier) {
      throw ParseError("expected a species name", line, token.column);
    }
    term.name = token.text;
    terms.push_back(std::move(term));
    const Token sep = scanner.peek();
    if (sep.kind != Token::Kind::plus) break;
    scanner.next();
    token = scanner.next();
  }
  return terms;
}

}  // namespace

ReactionNetwork parse_network(const std::string& text) {
  std::vector<Species> species;
  std::map<std::string, std::size_t> species_index;
  std::vector<PendingReaction> pending;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t pair_line = 0;

  std::istringstream input(text);
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(input, raw)) {
    ++line_number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    LineScanner scanner(raw, line_number);
    const Token keyword = scanner.next();
    if (keyword.kind == Token::Kind::end) continue;
    if (keyword.kind != Token::Kind::identifier) {
      throw ParseError("expected a directive (species, const, reaction, pair)", line_number, keyword.column);
    }

    auto declare = [&](const Token& name, SpeciesKind kind, std::int64_t count) {
      if (species_index.count(name.text)) {
        throw ParseError("duplicate species '" + name.text + "'", line_number, name.column);
      }
      species_index[name.text] = species.size();
      species.push_back(Species{name.text, kind, count});
    };

    if (keyword.text == "species") {
      Token name = scanner.next();
      if (name.kind != Token::Kind::identifier) throw ParseError("expected a species name", line_number, name.column);
      while (name.kind == Token::Kind::identifier) {
        declare(name, SpeciesKind::dynamic, 0);
        name = scanner.next();
      }
      if (name.kind != Token::Kind::end) throw ParseError("expected a species name", line_number, name.column);
    } else if (keyword.text == "const") {
      const Token name = scanner.next();
      if (name.kind != Token::Kind::identifier) throw ParseError("expected a species name", line_number, name.column);
      const Token eq = scanner.next();
      if (eq.kind != Token::Kind::equals) throw ParseError("expected '='", line_number, eq.column);
      const Token value = scanner.next();
      if (value.kind != Token::Kind::number) throw ParseError("expected a copy number", line_number, value.column);
      const std::int64_t count = parse_integer(value, line_number);
      if (count < 0) throw ParseError("copy number must be nonnegative", line_number, value.column);
      declare(name, SpeciesKind::chemostatted, count);
      const Token rest = scanner.next();
      if (rest.kind != Token::Kind::end) throw ParseError("unexpected trailing input", line_number, rest.column);
    } else if (keyword.text == "reaction") {
      PendingReaction reaction;
      reaction.line = line_number;
      reaction.reactants = parse_side(scanner, line_number, Token::Kind::arrow);
      const Token arrow = scanner.next();
      if (arrow.kind != Token::Kind::arrow) throw ParseError("expected '->'", line_number, arrow.column);
      reaction.products = parse_side(scanner, line_number, Token::Kind::colon);
      const Token colon = scanner.next();
      if (colon.kind != Token::Kind::colon) throw ParseError("expected ':' before the rate constant", line_number, colon.column);
      const Token rate = scanner.next();
      if (rate.kind != Token::Kind::number) throw ParseError("expected a rate constant", line_number, rate.column);
      reaction.rate = parse_real(rate, line_number);
      if (!(reaction.rate > 0.0) || reaction.rate == std::numeric_limits<double>::infinity()) {
        throw ParseError("rate constant must be a positive finite number", line_number, rate.column);
      }
      const Token rest = scanner.next();
      if (rest.kind != Token::Kind::end) throw ParseError("unexpected trailing input", line_number, rest.column);
      if (reaction.reactants.empty() && reaction.products.empty()) {
        throw ParseError("reaction has no species on either side", line_number, arrow.column);
      }
      pending.push_back(std::move(reaction));
    } else if (keyword.text == "pair") {
      const Token a = scanner.next();
      const Token b = scanner.next();
      if (a.kind != Token::Kind::number || b.kind != Token::Kind::number) {
        throw ParseError("expected two reaction ids", line_number, a.column);
      }
      const auto i = parse_integer(a, line_number);
      const auto j = parse_integer(b, line_number);
      if (i < 0 || j < 0) throw ParseError("reaction ids are nonnegative", line_number, a.column);
      const Token rest = scanner.next();
      if (rest.kind != Token::Kind::end) throw ParseError("unexpected trailing input", line_number, rest.column);
      pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      pair_line = line_number;
    } else {
      throw ParseError("unknown directive '" + keyword.text + "'", line_number, keyword.column);
    }
  }

  std::vector<Reaction> reactions;
  reactions.reserve(pending.size());
  for (const auto& p : pending) {
    Reaction reaction;
    reaction.id = reactions.size();
    reaction.rate_constant = p.rate;
    auto resolve = [&](const std::vector<PendingTerm>& side, std::vector<Term>& out) {
      for (const auto& term : side) {
        const auto it = species_index.find(term.name);
        if (it == species_index.end()) {
          throw ParseError("undeclared species '" + term.name + "'", p.line, term.column);
        }
        out.push_back(Term{it->second, term.coefficient});
      }
    };
    resolve(p.reactants, reaction.reactants);
    resolve(p.products, reaction.products);
    reactions.push_back(std::move(reaction));
  }

  std::optional<std::vector<std::size_t>> pairing;
  if (!pairs.empty()) {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> rev(reactions.size(), unset);
    for (const auto& [i, j] : pairs) {
      if (i >= reactions.size() || j >= reactions.size()) {
        throw ParseError("pair references an unknown reaction id", pair_line, 0);
      }
      if ((rev[i] != unset && rev[i] != j) || (rev[j] != unset && rev[j] != i)) {
        throw ParseError("reaction paired twice", pair_line, 0);
      }
      rev[i] = j;
      rev[j] = i;
    }
    for (std::size_t r = 0; r < rev.size(); ++r) {
      if (rev[r] == unset) throw ParseError("reaction " + std::to_string(r) + " has no reverse pair", pair_line, 0);
    }
    pairing = std::move(rev);
  }

  try {
    return ReactionNetwork(std::move(species), std::move(reactions), std::move(pairing));
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), pair_line ? pair_line : line_number, 0);
  }
}

ReactionNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_network(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

std::string serialize_network(const ReactionNetwork& network) {
  std::ostringstream out;
  out << std::setprecision(17);
  // One line per species keeps the declaration order across kinds.
  for (const auto& s : network.species()) {
    if (s.kind == SpeciesKind::dynamic) {
      out << "species " << s.name << '\n';
    } else {
      out << "const " << s.name << " = " << s.fixed_count << '\n';
    }
  }
  auto write_side = [&](const std::vector<Term>& side) {
    if (side.empty()) {
      out << '0';
      return;
    }
    for (std::size_t i = 0; i < side.size(); ++i) {
      if (i) out << " + ";
      if (side[i].coefficient != 1) out << side[i].coefficient << ' ';
      out << network.species()[side[i].species].name;
    }
  };
  for (const auto& r : network.reactions()) {
    out << "reaction ";
    write_side(r.reactants);
    out << " -> ";
    write_side(r.products);
    out << " : " << r.rate_constant << '\n';
  }
  if (network.has_reverse_pairing()) {
    for (std::size_t r = 0; r < network.reaction_count(); ++r) {
      const auto q = network.reverse_channel(r);
      if (r <= q) out << "pair " << r << ' ' << q << '\n';
    }
  }
  return out.str();
}

}  // namespace paththerm
