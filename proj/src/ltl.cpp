#include "ltlrl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace ltlrl {

namespace {

bool valid_atom_name(const std::string& name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
    return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Formula construction
// ---------------------------------------------------------------------------

int Formula::arity() const {
  switch (kind_) {
    case LtlKind::True:
    case LtlKind::False:
    case LtlKind::Atom:
      return 0;
    case LtlKind::Not:
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
      return 1;
    default:
      return 2;
  }
}

bool Formula::is_temporal_free() const {
  switch (kind_) {
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
    case LtlKind::Until:
      return false;
    default:
      break;
  }
  if (left_ && !left_->is_temporal_free()) return false;
  if (right_ && !right_->is_temporal_free()) return false;
  return true;
}

FormulaPtr Formula::make_true() {
  return FormulaPtr(new Formula(LtlKind::True, "", nullptr, nullptr));
}
FormulaPtr Formula::make_false() {
  return FormulaPtr(new Formula(LtlKind::False, "", nullptr, nullptr));
}
FormulaPtr Formula::make_atom(const std::string& name) {
  if (!valid_atom_name(name))
    throw std::invalid_argument("invalid atom name: '" + name + "'");
  return FormulaPtr(new Formula(LtlKind::Atom, name, nullptr, nullptr));
}
FormulaPtr Formula::make_not(FormulaPtr f) {
  return FormulaPtr(new Formula(LtlKind::Not, "", std::move(f), nullptr));
}
FormulaPtr Formula::make_and(FormulaPtr l, FormulaPtr r) {
  return FormulaPtr(
      new Formula(LtlKind::And, "", std::move(l), std::move(r)));
}
FormulaPtr Formula::make_or(FormulaPtr l, FormulaPtr r) {
  return FormulaPtr(new Formula(LtlKind::Or, "", std::move(l), std::move(r)));
}
FormulaPtr Formula::make_implies(FormulaPtr l, FormulaPtr r) {
  return FormulaPtr(
      new Formula(LtlKind::Implies, "", std::move(l), std::move(r)));
}
FormulaPtr Formula::make_next(FormulaPtr f) {
  return FormulaPtr(new Formula(LtlKind::Next, "", std::move(f), nullptr));
}
FormulaPtr Formula::make_globally(FormulaPtr f) {
  return FormulaPtr(
      new Formula(LtlKind::Globally, "", std::move(f), nullptr));
}
FormulaPtr Formula::make_finally(FormulaPtr f) {
  return FormulaPtr(new Formula(LtlKind::Finally, "", std::move(f), nullptr));
}
FormulaPtr Formula::make_until(FormulaPtr l, FormulaPtr r) {
  return FormulaPtr(
      new Formula(LtlKind::Until, "", std::move(l), std::move(r)));
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() == LtlKind::Atom) return a.atom_name() == b.atom_name();
  if (a.left() && !structurally_equal(*a.left(), *b.left())) return false;
  if (a.right() && !structurally_equal(*a.right(), *b.right())) return false;
  return true;
}

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* cur = stack.back();
    stack.pop_back();
    if (cur->kind() == LtlKind::Atom) out.insert(cur->atom_name());
    if (cur->left()) stack.push_back(cur->left().get());
    if (cur->right()) stack.push_back(cur->right().get());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels used by both the printer and the parser:
// -> (1) < | (2) < & (3) < U (4) < unary (5) < primary (6).
int precedence(LtlKind k) {
  switch (k) {
    case LtlKind::Implies:
      return 1;
    case LtlKind::Or:
      return 2;
    case LtlKind::And:
      return 3;
    case LtlKind::Until:
      return 4;
    case LtlKind::Not:
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
      return 5;
    default:
      return 6;
  }
}

void print_rec(const Formula& f, int min_prec, std::string& out) {
  const int prec = precedence(f.kind());
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f.kind()) {
    case LtlKind::True:
      out += "true";
      break;
    case LtlKind::False:
      out += "false";
      break;
    case LtlKind::Atom:
      out += f.atom_name();
      break;
    case LtlKind::Not:
      out += '!';
      print_rec(*f.left(), 5, out);
      break;
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
      out += f.kind() == LtlKind::Next ? 'X'
             : f.kind() == LtlKind::Globally ? 'G' : 'F';
      out += ' ';
      print_rec(*f.left(), 5, out);
      break;
    case LtlKind::Until:  // right-associative
      print_rec(*f.left(), 5, out);
      out += " U ";
      print_rec(*f.right(), 4, out);
      break;
    case LtlKind::And:  // left-associative
      print_rec(*f.left(), 3, out);
      out += " & ";
      print_rec(*f.right(), 4, out);
      break;
    case LtlKind::Or:
      print_rec(*f.left(), 2, out);
      out += " | ";
      print_rec(*f.right(), 3, out);
      break;
    case LtlKind::Implies:  // right-associative
      print_rec(*f.left(), 2, out);
      out += " -> ";
      print_rec(*f.right(), 1, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print_rec(f, 1, out);
  return out;
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  LParen,
  RParen,
  Not,
  And,
  Or,
  Implies,
  Next,
  Globally,
  Finally,
  Until,
  True,
  False,
  Atom,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Splits a word token into leading unary operators and a residue. "FGy"
// becomes F, G, atom y; "F1" stays the atom "F1" because "1" is not a
// valid residue on its own.
void lex_word(const std::string& word, std::size_t pos,
              std::vector<Token>& out) {
  auto residue_ok = [](const std::string& rest) {
    return rest.empty() || rest == "U" || rest == "true" || rest == "false" ||
           valid_atom_name(rest);
  };
  std::size_t run = 0;
  while (run < word.size() &&
         (word[run] == 'F' || word[run] == 'G' || word[run] == 'X'))
    ++run;
  while (run > 0 && !residue_ok(word.substr(run))) --run;
  for (std::size_t i = 0; i < run; ++i) {
    Tok k = word[i] == 'F' ? Tok::Finally
            : word[i] == 'G' ? Tok::Globally : Tok::Next;
    out.push_back({k, std::string(1, word[i]), pos + i});
  }
  const std::string rest = word.substr(run);
  if (rest.empty()) return;
  if (rest == "U")
    out.push_back({Tok::Until, rest, pos + run});
  else if (rest == "true")
    out.push_back({Tok::True, rest, pos + run});
  else if (rest == "false")
    out.push_back({Tok::False, rest, pos + run});
  else
    out.push_back({Tok::Atom, rest, pos + run});
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    switch (c) {
      case '(':
        out.push_back({Tok::LParen, "(", i++});
        continue;
      case ')':
        out.push_back({Tok::RParen, ")", i++});
        continue;
      case '!':
      case '~':
        out.push_back({Tok::Not, std::string(1, c), i++});
        continue;
      case '&':
        out.push_back({Tok::And, "&", i});
        i += (i + 1 < text.size() && text[i + 1] == '&') ? 2 : 1;
        continue;
      case '|':
        out.push_back({Tok::Or, "|", i});
        i += (i + 1 < text.size() && text[i + 1] == '|') ? 2 : 1;
        continue;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::Implies, "->", i});
          i += 2;
          continue;
        }
        throw ParseError("unknown token '-'", i);
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      lex_word(text.substr(i, j - i), i, out);
      i = j;
      continue;
    }
    throw ParseError(std::string("unknown token '") + c + "'", i);
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_implies();
    if (peek().kind != Tok::End)
      throw ParseError("unexpected token '" + peek().text + "'", peek().pos);
    return f;
  }

 private:
  const Token& peek() const { return tokens_[index_]; }
  Token take() { return tokens_[index_++]; }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (peek().kind == Tok::Implies) {
      take();
      return Formula::make_implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (peek().kind == Tok::Or) {
      take();
      lhs = Formula::make_or(std::move(lhs), parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_until();
    while (peek().kind == Tok::And) {
      take();
      lhs = Formula::make_and(std::move(lhs), parse_until());
    }
    return lhs;
  }

  FormulaPtr parse_until() {
    FormulaPtr lhs = parse_unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::make_until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    const Token tok = take();
    switch (tok.kind) {
      case Tok::Not:
        return Formula::make_not(parse_unary());
      case Tok::Next:
        return Formula::make_next(parse_unary());
      case Tok::Globally:
        return Formula::make_globally(parse_unary());
      case Tok::Finally:
        return Formula::make_finally(parse_unary());
      case Tok::True:
        return Formula::make_true();
      case Tok::False:
        return Formula::make_false();
      case Tok::Atom:
        return Formula::make_atom(tok.text);
      case Tok::LParen: {
        FormulaPtr f = parse_implies();
        if (peek().kind != Tok::RParen)
          throw ParseError("expected ')'", peek().pos);
        take();
        return f;
      }
      case Tok::End:
        throw ParseError("syntax error at end of input", tok.pos);
      default:
        throw ParseError("unexpected token '" + tok.text + "'", tok.pos);
    }
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

}  // namespace

FormulaPtr parse_ltl(const std::string& text) {
  return Parser(lex(text)).parse();
}

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

Alphabet::Alphabet(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  if (static_cast<int>(atoms_.size()) > kMaxAtoms)
    throw std::invalid_argument("alphabet exceeds " +
                                std::to_string(kMaxAtoms) + " atoms");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!valid_atom_name(atoms_[i]))
      throw std::invalid_argument("invalid atom name: '" + atoms_[i] + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms_[i] == atoms_[j])
        throw std::invalid_argument("duplicate atom: '" + atoms_[i] + "'");
  }
}

int Alphabet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i] == name) return static_cast<int>(i);
  return -1;
}

Letter Alphabet::singleton(const std::string& name) const {
  const int idx = index_of(name);
  if (idx < 0) throw std::invalid_argument("undeclared atom: '" + name + "'");
  return Letter{1} << idx;
}

std::string Alphabet::format_letter(Letter a) const {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < size(); ++i) {
    if (!(a >> i & 1u)) continue;
    if (!first) out += ',';
    out += atoms_[i];
    first = false;
  }
  return out + "}";
}

LetterMap::LetterMap(const Alphabet& from, const Alphabet& to) {
  bit_of_.reserve(from.size());
  for (const std::string& atom : from.atoms()) {
    const int idx = to.index_of(atom);
    if (idx < 0)
      throw std::invalid_argument("atom '" + atom +
                                  "' is not declared in the target alphabet");
    bit_of_.push_back(idx);
  }
}

Letter LetterMap::translate(Letter a) const {
  Letter out = 0;
  for (std::size_t i = 0; i < bit_of_.size(); ++i)
    if (a >> i & 1u) out |= Letter{1} << bit_of_[i];
  return out;
}

// ---------------------------------------------------------------------------
// Lasso-word evaluation
// ---------------------------------------------------------------------------

namespace {

using Values = std::vector<char>;  // truth value per word position

class LassoEvaluator {
 public:
  explicit LassoEvaluator(const LassoWord& w)
      : word_(w),
        cycle_start_(static_cast<int>(w.prefix.size())),
        total_(static_cast<int>(w.prefix.size() + w.cycle.size())) {}

  const Values& eval(const Formula& f) {
    auto it = memo_.find(&f);
    if (it != memo_.end()) return it->second;
    Values v(total_, 0);
    switch (f.kind()) {
      case LtlKind::True:
        std::fill(v.begin(), v.end(), 1);
        break;
      case LtlKind::False:
        break;
      case LtlKind::Atom: {
        const int bit = word_.alphabet.index_of(f.atom_name());
        if (bit < 0)
          throw EvalError("undeclared atom: '" + f.atom_name() + "'");
        for (int p = 0; p < total_; ++p) v[p] = letter(p) >> bit & 1u;
        break;
      }
      case LtlKind::Not: {
        const Values& c = eval(*f.left());
        for (int p = 0; p < total_; ++p) v[p] = !c[p];
        break;
      }
      case LtlKind::And:
      case LtlKind::Or:
      case LtlKind::Implies: {
        const Values& l = eval(*f.left());
        const Values& r = eval(*f.right());
        for (int p = 0; p < total_; ++p) {
          if (f.kind() == LtlKind::And)
            v[p] = l[p] && r[p];
          else if (f.kind() == LtlKind::Or)
            v[p] = l[p] || r[p];
          else
            v[p] = !l[p] || r[p];
        }
        break;
      }
      case LtlKind::Next: {
        const Values& c = eval(*f.left());
        for (int p = 0; p < total_; ++p) v[p] = c[next(p)];
        break;
      }
      case LtlKind::Globally:
        v = fixpoint(eval(*f.left()), eval(*f.left()), /*gfp=*/true,
                     [](char child, char, char succ) -> char {
                       return child && succ;
                     });
        break;
      case LtlKind::Finally:
        v = fixpoint(eval(*f.left()), eval(*f.left()), /*gfp=*/false,
                     [](char child, char, char succ) -> char {
                       return child || succ;
                     });
        break;
      case LtlKind::Until:
        v = fixpoint(eval(*f.left()), eval(*f.right()), /*gfp=*/false,
                     [](char l, char r, char succ) -> char {
                       return r || (l && succ);
                     });
        break;
    }
    return memo_.emplace(&f, std::move(v)).first->second;
  }

 private:
  Letter letter(int p) const {
    return p < cycle_start_ ? word_.prefix[p]
                            : word_.cycle[p - cycle_start_];
  }
  int next(int p) const { return p + 1 < total_ ? p + 1 : cycle_start_; }

  // Solve v[p] = step(l[p], r[p], v[next(p)]) as a least (or greatest)
  // fixpoint on the cycle, then close the prefix in one backward pass.
  template <typename Step>
  Values fixpoint(const Values& l, const Values& r, bool gfp, Step step) {
    Values v(total_, gfp ? 1 : 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int p = total_ - 1; p >= cycle_start_; --p) {
        const char nv = step(l[p], r[p], v[next(p)]);
        if (nv != v[p]) {
          v[p] = nv;
          changed = true;
        }
      }
    }
    for (int p = cycle_start_ - 1; p >= 0; --p)
      v[p] = step(l[p], r[p], v[p + 1]);
    return v;
  }

  const LassoWord& word_;
  int cycle_start_;
  int total_;
  std::map<const Formula*, Values> memo_;
};

}  // namespace

bool eval_lasso(const Formula& phi, const LassoWord& w) {
  if (w.cycle.empty()) throw EvalError("lasso cycle must be nonempty");
  LassoEvaluator evaluator(w);
  return evaluator.eval(phi)[0] != 0;
}

}  // namespace ltlrl
