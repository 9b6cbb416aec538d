#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltlrl {

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

enum class LtlKind {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Globally,
  Finally,
  Until,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable LTL syntax tree node. Construct through the static factories,
/// which enforce arity and atom naming.
class Formula {
 public:
  LtlKind kind() const { return kind_; }
  const std::string& atom_name() const { return atom_; }
  const FormulaPtr& left() const { return left_; }
  const FormulaPtr& right() const { return right_; }
  int arity() const;

  /// True when no temporal operator (X, G, F, U) occurs anywhere below.
  bool is_temporal_free() const;

  static FormulaPtr make_true();
  static FormulaPtr make_false();
  static FormulaPtr make_atom(const std::string& name);
  static FormulaPtr make_not(FormulaPtr f);
  static FormulaPtr make_and(FormulaPtr l, FormulaPtr r);
  static FormulaPtr make_or(FormulaPtr l, FormulaPtr r);
  static FormulaPtr make_implies(FormulaPtr l, FormulaPtr r);
  static FormulaPtr make_next(FormulaPtr f);
  static FormulaPtr make_globally(FormulaPtr f);
  static FormulaPtr make_finally(FormulaPtr f);
  static FormulaPtr make_until(FormulaPtr l, FormulaPtr r);

 private:
  Formula(LtlKind kind, std::string atom, FormulaPtr l, FormulaPtr r)
      : kind_(kind), atom_(std::move(atom)), left_(std::move(l)),
        right_(std::move(r)) {}

  LtlKind kind_;
  std::string atom_;
  FormulaPtr left_;
  FormulaPtr right_;
};

bool structurally_equal(const Formula& a, const Formula& b);
std::set<std::string> atoms_of(const Formula& f);

/// Minimal-parenthesis rendering that re-parses to the same tree.
std::string to_string(const Formula& f);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at offset " +
                           std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

/// Parse the concrete grammar:
///   formula := implies
///   implies := or ("->" implies)?
///   or      := and ("|" and)*
///   and     := until ("&" until)*
///   until   := unary ("U" until)?
///   unary   := ("!"|"~"|"X"|"G"|"F") unary | atom | "true" | "false"
///            | "(" formula ")"
/// Unary precedence binds tightest, U is right-associative, then "&",
/// then "|", then "->" (right-associative). Juxtaposed unary operators
/// are accepted without spaces ("FGy"); a word's maximal leading run of
/// F/G/X characters is read as operators when the remainder is a valid
/// atom or keyword, so atoms must not begin with F, G, X or be "U".
FormulaPtr parse_ltl(const std::string& text);

// ---------------------------------------------------------------------------
// Letters and lasso words
// ---------------------------------------------------------------------------

/// A letter is a subset of atomic propositions, packed as a bitmask whose
/// bit order is given by an Alphabet.
using Letter = std::uint32_t;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> atoms);

  int size() const { return static_cast<int>(atoms_.size()); }
  std::uint32_t letter_count() const { return 1u << atoms_.size(); }
  const std::vector<std::string>& atoms() const { return atoms_; }

  /// Index of an atom, or -1 when not declared.
  int index_of(const std::string& name) const;

  Letter singleton(const std::string& name) const;
  std::string format_letter(Letter a) const;

  bool operator==(const Alphabet& other) const {
    return atoms_ == other.atoms_;
  }

  static constexpr int kMaxAtoms = 16;

 private:
  std::vector<std::string> atoms_;
};

/// Bit remapping from one alphabet into another. Every source atom must be
/// declared in the target alphabet.
class LetterMap {
 public:
  LetterMap(const Alphabet& from, const Alphabet& to);
  Letter translate(Letter a) const;

 private:
  std::vector<int> bit_of_;
};

/// Finite presentation of the infinite word prefix . cycle^omega.
struct LassoWord {
  Alphabet alphabet;
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;  // never empty
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact LTL semantics on an ultimately periodic word. Temporal operators
/// are resolved by a fixpoint over the cycle positions followed by one
/// backward pass through the prefix.
bool eval_lasso(const Formula& phi, const LassoWord& w);

}  // namespace ltlrl
