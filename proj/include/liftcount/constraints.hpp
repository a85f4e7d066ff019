#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "liftcount/mln.hpp"
#include "liftcount/spectrum.hpp"

namespace liftcount {

/// 0/1 predicate over count vectors.
class CardinalityPredicate {
public:
    using Custom = std::function<bool(std::span<const std::size_t>)>;

    /// Always true.
    CardinalityPredicate();
    static CardinalityPredicate tautology() { return {}; }
    static CardinalityPredicate equals(std::size_t dim, std::size_t value);
    /// lo <= n[dim] <= hi
    static CardinalityPredicate between(std::size_t dim, std::size_t lo, std::size_t hi);
    static CardinalityPredicate conjunction(std::vector<CardinalityPredicate> parts);
    /// `arity` is the smallest vector length the function accepts.
    static CardinalityPredicate custom(Custom f, std::size_t arity, std::string label = "custom");

    bool operator()(std::span<const std::size_t> n) const;
    /// Number of leading count dimensions inspected.
    std::size_t arity() const;
    bool is_tautology() const;
    /// Same predicate reading dimensions shifted by `offset`.
    CardinalityPredicate shifted(std::size_t offset) const;
    /// Dimensions actually read, ascending.
    std::vector<std::size_t> dims() const;
    /// Same predicate with dimension d read from position old_to_new[d].
    /// The mapping must be increasing on dims().
    CardinalityPredicate remapped(std::span<const std::size_t> old_to_new) const;
    std::string to_string() const;

private:
    struct Node;
    explicit CardinalityPredicate(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct CardinalityConstraint {
    CountSpec psi;
    CardinalityPredicate g;

    /// Throws std::invalid_argument if g reads past |psi|.
    void validate() const;
};

/// Drops the count formulas g does not read.
CardinalityConstraint project(const CardinalityConstraint& cc);

/// psi_a followed by psi_b, g_a and g_b (shifted).
CardinalityConstraint combine(const CardinalityConstraint& a, const CardinalityConstraint& b);

/// Z' = Z * sum_n g(n) q(n). Throws infeasible_error when the surviving
/// mass is not above the rounding resolution of the count distribution:
/// either no world survives or too little mass survives to be resolved.
/// An empty psi means no constraint.
real constrained_partition(const Mln& phi, const CardinalityConstraint& cc, Domain d);

/// P(gamma | g) using the grid extended with a 0/1 axis for gamma.
real constrained_marginal(const Mln& phi, const CardinalityConstraint& cc, const Formula& gamma,
                          Domain d);

/// Distribution over psi restricted to g and renormalised.
CountDistribution constrained_distribution(const Mln& phi, const CardinalityConstraint& cc,
                                           Domain d);

struct FunctionConstraint {
    std::string relation;
};

struct FunctionRewrite {
    std::vector<Formula> hard;
    CardinalityConstraint constraint;
};

/// Func(R) becomes the hard sentence forall x exists y R(x,y) plus |R| = |domain|.
/// Count formulas are named "|R|".
FunctionRewrite rewrite_function_constraints(const std::vector<FunctionConstraint>& fcs,
                                             Domain d);

/// The literal definition: forall x exists y R(x,y) and
/// forall x,y,z R(x,y) & R(x,z) -> y = z. Three variables; brute force only.
Formula functionality_sentence(const std::string& relation);

struct FixedPointRow {
    std::size_t k;
    real engine;
    real analytic;
};

/// P(k fixed points) of a uniformly random function on n elements, from the
/// count distribution of {hard forall x exists y f(x,y)} over
/// {f(x,y), f(x,x)} restricted to |f| = n.
std::vector<FixedPointRow> fixed_point_distribution(std::size_t n);

/// C(n,k) (n-1)^(n-k) / n^n, numerator and denominator exact.
real analytic_fixed_points(std::size_t n, std::size_t k);

}  // namespace liftcount
