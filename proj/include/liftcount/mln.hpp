#pragma once

#include <limits>
#include <string>
#include <vector>

#include "liftcount/brute.hpp"
#include "liftcount/lifted.hpp"
#include "liftcount/logic.hpp"
#include "liftcount/numeric.hpp"

namespace liftcount {

inline constexpr double kHardWeight = std::numeric_limits<double>::infinity();

struct WeightedFormula {
    Formula formula;
    double weight;  // natural-log scale; kHardWeight for hard formulas
    bool hard() const { return weight == kHardWeight; }
};

/// Markov logic network: weighted formulas over a vocabulary.
class Mln {
public:
    Mln() = default;
    explicit Mln(Vocabulary vocab) : vocab_(std::move(vocab)) {}

    /// Throws std::invalid_argument for NaN or -inf weights, undeclared
    /// predicates, or more than two variables.
    void add(Formula f, double weight);
    void add_hard(Formula f) { add(std::move(f), kHardWeight); }

    const Vocabulary& vocabulary() const { return vocab_; }
    const std::vector<WeightedFormula>& formulas() const { return formulas_; }

private:
    Vocabulary vocab_;
    std::vector<WeightedFormula> formulas_;
};

/// WFOMC encoding of an MLN. Each soft formula gets an indicator predicate
/// xi with forall vars: xi(vars) <-> alpha, w(xi) = exp(weight), wbar(xi) = 1.
/// Hard formulas enter gamma as their universal closure.
struct Translation {
    Vocabulary vocabulary;
    std::vector<Formula> gamma;
    WeightFunction w;
    WeightFunction wbar;
    std::vector<std::string> indicators;  // one per soft formula, in order

    /// Adds a fresh indicator for `f` (arity = number of free variables) and
    /// its defining sentence. Returns the predicate name; weights stay 1.
    std::string add_indicator(const Formula& f);
};

Translation translate_mln(const Mln& phi);

struct PartitionValue {
    real value;      // Z
    qcomplex raw;    // the WFOMC value before the residue check
    real magnitude;  // sum of |term| in the lifted sum
};

/// Checks a real-valued WFOMC result and returns its real part. Throws
/// residue_error if |Im| > 1e-9 (1 + |Re|) or the value is clearly negative,
/// and infeasible_error if it is zero relative to the summed magnitude.
real checked_real(const WfomcValue& v, const char* what);

PartitionValue partition_function(const Mln& phi, Domain d);

/// P(gamma) under phi; gamma must be a sentence.
real marginal(const Mln& phi, const Formula& gamma, Domain d);

}  // namespace liftcount
