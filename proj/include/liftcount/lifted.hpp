#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liftcount/brute.hpp"
#include "liftcount/logic.hpp"
#include "liftcount/numeric.hpp"

namespace liftcount {

/// Quantifier prefix of a normalised two-variable sentence. Matrices are
/// quantifier-free and use the variables "x" (outer) and "y" (inner).
enum class Prefix {
    none,           // matrix over nullary atoms only
    forall_x,       // forall x phi(x)
    forall_xy,      // forall x forall y phi(x,y)
    forall_exists,  // forall x exists y phi(x,y)
    exists_x,       // exists x phi(x)
};

struct Fo2Sentence {
    Prefix prefix;
    Formula matrix;
};

struct Fo2Theory {
    Vocabulary vocabulary;
    std::vector<Fo2Sentence> sentences;
};

/// Rewrites closed two-variable sentences into an equi-weighted Fo2Theory.
/// Every nested quantified subformula is replaced by a fresh unary or
/// nullary predicate (weights 1/1) defined by a pair of prefixed sentences,
/// so the weighted count is unchanged on every domain.
/// Throws unsupported_error for free variables, constants, element terms,
/// equality atoms or more than two variables.
Fo2Theory normalize_theory(const std::vector<Formula>& sentences, const Vocabulary& vocab);

struct SkolemizedTheory {
    Fo2Theory theory;
    WeightFunction w;
    WeightFunction wbar;
};

/// Removes existential prefixes. forall x exists y phi becomes
/// forall x forall y (phi -> S(x)) and exists x phi becomes
/// forall x (phi -> S), where S is fresh with w(S) = 1 and wbar(S) = -1.
/// A theory without existentials is returned unchanged.
SkolemizedTheory skolemize(const Fo2Theory& theory, const WeightFunction& w,
                           const WeightFunction& wbar);

/// Truth assignment to the unary atoms P(x) and reflexive atoms R(x,x) of a
/// single element. Bit i is the i-th unary predicate in vocabulary order,
/// followed by one bit per binary predicate in vocabulary order.
struct Cell {
    std::uint64_t bits = 0;
    friend bool operator==(Cell, Cell) = default;
};

/// Cells consistent with matrix(x, x), in increasing bit order. The
/// vocabulary must not contain nullary predicates.
std::vector<Cell> enumerate_cells(const Vocabulary& vocab, const Formula& matrix);

/// Product of w / wbar over the atoms fixed by a cell.
qcomplex cell_weight(const Cell& c, const Vocabulary& vocab, const WeightFunction& w,
                     const WeightFunction& wbar);

/// Weighted sum over the binary atoms between two distinct elements a, b
/// (both directions) such that matrix(a,b) and matrix(b,a) hold when a has
/// cell ci and b has cell cj. Symmetric in (ci, cj).
qcomplex pair_weight(const Cell& ci, const Cell& cj, const Vocabulary& vocab,
                     const Formula& matrix, const WeightFunction& w, const WeightFunction& wbar);

struct LiftedStats {
    std::size_t branches = 0;      // nullary assignments with at least one cell
    std::size_t cells = 0;         // summed over branches
    std::size_t compositions = 0;  // summed over branches
};

struct WfomcValue {
    qcomplex value;
    /// Sum of |term| over all composition terms; |value| much smaller than
    /// this means heavy cancellation.
    real magnitude = 0;
    LiftedStats stats;
};

/// Binomial coefficient C(n + parts - 1, parts - 1); 0 parts of 0 is 1.
std::uint64_t composition_count(std::size_t n, std::size_t parts);

/// Domain-lifted weighted model counter for a fixed theory. Construction
/// normalises, Skolemises and precomputes the weight-independent structure
/// (cells and admissible pair assignments); count() then runs in time
/// polynomial in the domain size.
class LiftedCounter {
public:
    LiftedCounter(const std::vector<Formula>& sentences, const Vocabulary& vocab);
    explicit LiftedCounter(const Fo2Theory& theory);

    /// WFOMC of the theory. Throws overflow_error if a term leaves the
    /// representable range.
    WfomcValue count(const WeightFunction& w, const WeightFunction& wbar, Domain d) const;

    const Fo2Theory& theory() const { return skolemized_; }

private:
    struct Branch {
        std::vector<std::pair<std::string, bool>> nullary;  // assignment
        std::vector<std::uint64_t> cells;                   // cell bits
        // admissible cross assignments for cells (i, j), i <= j, row-major
        // over the upper triangle
        std::vector<std::vector<std::uint32_t>> pairs;
    };

    void compile();

    Fo2Theory skolemized_;
    WeightFunction skolem_w_;
    WeightFunction skolem_wbar_;
    std::vector<std::string> unary_;
    std::vector<std::string> binary_;
    std::vector<Branch> branches_;
};

WfomcValue lifted_wfomc(const Fo2Theory& theory, const WeightFunction& w,
                        const WeightFunction& wbar, Domain d);
WfomcValue lifted_wfomc(const std::vector<Formula>& sentences, const Vocabulary& vocab,
                        const WeightFunction& w, const WeightFunction& wbar, Domain d);

}  // namespace liftcount
