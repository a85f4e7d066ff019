#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftcount/logic.hpp"
#include "liftcount/numeric.hpp"

namespace liftcount {

inline constexpr std::size_t kDefaultBruteCap = 30;

/// Predicate name -> complex weight. Unlisted predicates weigh 1.
class WeightFunction {
public:
    WeightFunction() = default;
    WeightFunction(std::initializer_list<std::pair<const std::string, qcomplex>> init)
        : weights_(init) {}

    void set(const std::string& predicate, qcomplex value) { weights_[predicate] = std::move(value); }
    qcomplex operator()(std::string_view predicate) const;
    const std::map<std::string, qcomplex, std::less<>>& entries() const { return weights_; }

private:
    std::map<std::string, qcomplex, std::less<>> weights_;
};

/// Fixed order of all ground atoms: predicates in vocabulary order, then
/// argument tuples lexicographically. Atom i is bit i of a world mask.
class AtomTable {
public:
    struct Block {
        Predicate predicate;
        std::size_t offset;
        std::size_t count;
    };

    AtomTable(const Vocabulary& vocab, Domain d);

    std::size_t size() const { return atoms_.size(); }
    Domain domain() const { return domain_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const GroundAtom& atom(std::size_t i) const { return atoms_[i]; }
    /// Throws std::invalid_argument for unknown predicates or bad arguments.
    std::size_t index(std::string_view predicate, std::span<const std::size_t> args) const;

private:
    Domain domain_;
    std::vector<Block> blocks_;
    std::vector<GroundAtom> atoms_;
};

/// A closed formula grounded over an AtomTable into a propositional circuit
/// with quantifiers expanded and equality decided. Equality atoms and
/// any number of variables are fine here.
class GroundCircuit {
public:
    GroundCircuit(const Formula& sentence, const AtomTable& atoms);
    bool evaluate(std::uint64_t world) const { return eval(root_, world); }
    /// Bit j of the result is evaluate(base + j); base must be a multiple of 64.
    std::uint64_t evaluate64(std::uint64_t base) const { return eval64(root_, base); }

private:
    enum class Op : std::uint8_t { constant, atom, negation, conjunction, disjunction, equivalence };
    struct Node {
        Op op;
        bool value = false;
        std::uint32_t atom = 0;
        std::uint32_t first = 0;  // children are kids_[first, first + count)
        std::uint32_t count = 0;
    };

    std::uint32_t compile(const Formula& f, std::map<std::string, std::size_t>& env,
                          const AtomTable& atoms);
    std::uint32_t add(Node n, const std::vector<std::uint32_t>& kids);
    bool eval(std::uint32_t id, std::uint64_t world) const;
    std::uint64_t eval64(std::uint32_t id, std::uint64_t base) const;

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> kids_;
    std::uint32_t root_ = 0;
};

/// All 2^A worlds over a vocabulary and domain, where A is the number of
/// ground atoms. Refuses (brute_cap_error) when A exceeds the cap.
class WorldSpace {
public:
    WorldSpace(const Vocabulary& vocab, Domain d, std::size_t cap = kDefaultBruteCap);

    const AtomTable& atoms() const { return atoms_; }
    std::uint64_t count() const { return std::uint64_t{1} << atoms_.size(); }
    PossibleWorld world(std::uint64_t mask) const;

private:
    AtomTable atoms_;
};

/// Materialises every world, in mask order. Intended for small spaces.
std::vector<PossibleWorld> enumerate_worlds(const Vocabulary& vocab, Domain d,
                                            std::size_t cap = kDefaultBruteCap);

/// Weighted model count by exhaustive enumeration: the sum over worlds
/// satisfying every sentence of gamma of prod w(pred) over true atoms times
/// prod wbar(pred) over false atoms.
std::complex<double> brute_wfomc(const std::vector<Formula>& gamma, const Vocabulary& vocab,
                                 const WeightFunction& w, const WeightFunction& wbar, Domain d,
                                 std::size_t cap = kDefaultBruteCap);

}  // namespace liftcount
