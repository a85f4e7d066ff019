#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liftcount/constraints.hpp"
#include "liftcount/mln.hpp"
#include "liftcount/spectrum.hpp"

namespace liftcount {

struct Query {
    std::string name;
    Formula sentence;
};

/// Contents of a model file, as written (function constraints not yet
/// rewritten).
struct Model {
    std::optional<Domain> domain;
    Mln mln;
    CountSpec counts;
    CardinalityPredicate cardinality;  // over `counts`
    std::vector<FunctionConstraint> functions;
    std::vector<Query> queries;

    const Vocabulary& vocabulary() const { return mln.vocabulary(); }
    bool constrained() const { return !cardinality.is_tautology() || !functions.empty(); }
};

/// Line-oriented model format, one directive per line, '#' starts a comment:
///
///     domain 10
///     predicate f/2
///     weight 1.5 : smokes(x) & friends(x,y) -> smokes(y)
///     odds 3 : p(x)
///     hard : forall x exists y f(x,y)
///     count fixed : f(x,x)
///     cardinality fixed == 2
///     cardinality fixed in 1..3
///     function f
///     query some : exists x p(x)
///
/// Throws parse_error with the line and column of the offending token.
Model parse_model(std::string_view text);
Model load_model(const std::filesystem::path& path);

/// What the lifted engine runs: the MLN with Func(R) replaced by its hard
/// sentence, and the cardinality constraint extended with |R| = |domain|.
struct Problem {
    Domain domain;
    Mln mln;
    CardinalityConstraint constraint;
};

/// Throws std::invalid_argument when the model has no domain directive.
Problem lifted_problem(const Model& m);

}  // namespace liftcount
