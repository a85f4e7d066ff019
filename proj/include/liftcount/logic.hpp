#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace liftcount {

/// Finite domain {0, ..., size-1}.
class Domain {
public:
    explicit Domain(std::size_t size);
    std::size_t size() const { return size_; }
    friend bool operator==(Domain, Domain) = default;

private:
    std::size_t size_;
};

/// Declared relation symbol. User vocabularies use arity 1 or 2; arity 0 is
/// reserved for predicates the engine introduces itself.
struct Predicate {
    std::string name;
    int arity = 1;
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::initializer_list<Predicate> preds);

    /// Throws std::invalid_argument on a duplicate name or arity outside 0..2.
    void add(Predicate p);
    const Predicate* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    std::size_t size() const { return preds_.size(); }
    auto begin() const { return preds_.begin(); }
    auto end() const { return preds_.end(); }
    const Predicate& operator[](std::size_t i) const { return preds_[i]; }

private:
    std::vector<Predicate> preds_;
};

/// Argument of an atom: a logic variable, a domain element (0-based index)
/// or a named constant. Constants parse but have no interpretation in the
/// canonical integer domain, so evaluation rejects them.
struct Term {
    enum class Kind { variable, element, constant };
    Kind kind = Kind::variable;
    std::string name;         // variable or constant name
    std::size_t element = 0;  // for Kind::element

    static Term var(std::string name) { return {Kind::variable, std::move(name), 0}; }
    static Term elem(std::size_t e) { return {Kind::element, {}, e}; }
    static Term constant(std::string name) { return {Kind::constant, std::move(name), 0}; }

    bool is_var() const { return kind == Kind::variable; }
    friend bool operator==(const Term&, const Term&) = default;
};

enum class NodeKind {
    truth,
    falsity,
    atom,
    equality,
    negation,
    conjunction,
    disjunction,
    implication,
    equivalence,
    forall,
    exists,
};

/// Immutable first-order formula (function-free). Copies share structure.
class Formula {
public:
    static Formula top();
    static Formula bottom();
    static Formula atom(std::string predicate, std::vector<Term> args);
    static Formula equality(Term lhs, Term rhs);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula equivalence(Formula a, Formula b);
    static Formula forall(std::string var, Formula body);
    static Formula exists(std::string var, Formula body);

    NodeKind kind() const;
    const std::string& predicate() const;  // atom
    const std::vector<Term>& args() const;  // atom, equality
    const std::string& variable() const;   // quantifiers
    std::size_t child_count() const;
    const Formula& child(std::size_t i) const;

    bool is_quantifier() const;
    bool is_binary() const;

    friend bool operator==(const Formula& a, const Formula& b);

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Formula operator!(const Formula& f);
Formula operator&&(const Formula& a, const Formula& b);
Formula operator||(const Formula& a, const Formula& b);

/// Conjunction of a list; `top()` when empty.
Formula conjoin(const std::vector<Formula>& fs);

struct ParseOptions {
    /// Distinct variable names allowed across the whole formula.
    std::size_t max_variables = 2;
};

/// Parses the formula surface syntax:
///   atoms `p(x)`, `p(x,y)`, `p()`; `true`, `false`; equality `x = y`;
///   `!` > `&` > `|` > `->` (right assoc) > `<->`;
///   `forall v φ`, `exists v φ` (also `forall x, y φ`) with the body
///   extending as far right as possible.
/// Lowercase identifiers are variables, uppercase are constants, integer
/// literals are domain elements. Throws parse_error with 1-based columns.
Formula parse_formula(std::string_view text, const Vocabulary& vocab,
                      const ParseOptions& options = {});

/// Fully parenthesised rendering; parse_formula(to_string(f)) == f for any f
/// built from declared predicates.
std::string to_string(const Formula& f);
std::string to_string(const Term& t);

std::set<std::string> free_variables(const Formula& f);
/// Every variable name occurring in f, bound or free.
std::set<std::string> all_variables(const Formula& f);

bool is_quantifier_free(const Formula& f);
bool mentions_constants(const Formula& f);
bool mentions_equality(const Formula& f);
/// Predicate names used in f.
std::set<std::string> predicates_of(const Formula& f);

/// Replaces free occurrences of variables. Bound occurrences are untouched.
Formula substitute(const Formula& f, const std::map<std::string, Term>& binding);
/// Renames free and bound variables alike (used on quantifier-free matrices
/// and when canonicalising prefixes).
Formula rename_variables(const Formula& f, const std::map<std::string, std::string>& renaming);

/// forall over the free variables, in sorted name order (outermost first).
Formula universal_closure(const Formula& f);

/// One ground instance per assignment of elements to free_variables(f).
/// Variables are taken in name order; the first varies slowest.
std::vector<Formula> groundings(const Formula& f, Domain d);

struct GroundAtom {
    std::string predicate;
    std::vector<std::size_t> args;
    friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
    friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
};

/// Set of ground atoms that are true; every other atom is false.
class PossibleWorld {
public:
    PossibleWorld() = default;
    PossibleWorld(std::initializer_list<GroundAtom> atoms) : atoms_(atoms) {}

    void insert(GroundAtom a) { atoms_.insert(std::move(a)); }
    bool contains(const GroundAtom& a) const { return atoms_.contains(a); }
    std::size_t size() const { return atoms_.size(); }
    const std::set<GroundAtom>& atoms() const { return atoms_; }

private:
    std::set<GroundAtom> atoms_;
};

/// Truth value of a closed formula; quantifiers range over d.
/// Throws std::invalid_argument on free variables, constants or
/// out-of-range elements.
bool evaluate(const Formula& f, const PossibleWorld& w, Domain d);

/// N(f, w): the number of groundings of f that are true in w.
std::size_t count_true_groundings(const Formula& f, const PossibleWorld& w, Domain d);

}  // namespace liftcount
