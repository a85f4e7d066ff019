#pragma once

// Random theory and weight generators shared by the property tests and the
// acceptance suite.

#include <random>
#include <string>
#include <vector>

#include "liftcount/brute.hpp"
#include "liftcount/logic.hpp"

namespace liftcount::testing {

inline Formula random_matrix(std::mt19937_64& rng, const Vocabulary& vocab,
                             const std::vector<std::string>& vars, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    if (depth == 0 || pick(rng) < 3) {
        std::uniform_int_distribution<std::size_t> pred(0, vocab.size() - 1);
        std::uniform_int_distribution<std::size_t> var(0, vars.size() - 1);
        const Predicate& p = vocab[pred(rng)];
        std::vector<Term> args;
        for (int i = 0; i < p.arity; ++i) args.push_back(Term::var(vars[var(rng)]));
        Formula a = Formula::atom(p.name, std::move(args));
        return pick(rng) < 3 ? !a : a;
    }
    Formula l = random_matrix(rng, vocab, vars, depth - 1);
    Formula r = random_matrix(rng, vocab, vars, depth - 1);
    switch (pick(rng) % 5) {
        case 0: return Formula::conjunction(l, r);
        case 1: return Formula::disjunction(l, r);
        case 2: return Formula::implication(l, r);
        case 3: return Formula::equivalence(l, r);
        default: return !Formula::disjunction(l, r);
    }
}

/// Up to two unary predicates and one binary predicate (at least one
/// predicate in total).
inline Vocabulary random_vocabulary(std::mt19937_64& rng, bool force_binary = false) {
    std::uniform_int_distribution<int> unary(0, 2);
    std::bernoulli_distribution binary(0.75);
    Vocabulary v;
    const int u = unary(rng);
    for (int i = 0; i < u; ++i) v.add({"p" + std::to_string(i), 1});
    if (force_binary || u == 0 || binary(rng)) v.add({"r", 2});
    return v;
}

/// One to three sentences with prefixes drawn from forall x, forall x forall y,
/// forall x exists y.
inline std::vector<Formula> random_sentences(std::mt19937_64& rng, const Vocabulary& vocab) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_int_distribution<int> prefix(0, 2);
    std::vector<Formula> out;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
        switch (prefix(rng)) {
            case 0:
                out.push_back(Formula::forall("x", random_matrix(rng, vocab, {"x"}, 2)));
                break;
            case 1:
                out.push_back(Formula::forall(
                    "x", Formula::forall("y", random_matrix(rng, vocab, {"x", "y"}, 2))));
                break;
            default:
                out.push_back(Formula::forall(
                    "x", Formula::exists("y", random_matrix(rng, vocab, {"x", "y"}, 2))));
                break;
        }
    }
    return out;
}

/// Real or complex weights of modulus at most e; about a third are complex,
/// some reals are negative.
inline void random_weights(std::mt19937_64& rng, const Vocabulary& vocab, WeightFunction& w,
                           WeightFunction& wbar) {
    std::uniform_real_distribution<double> mod(0.0, 2.718281828459045);
    std::uniform_real_distribution<double> angle(-3.141592653589793, 3.141592653589793);
    std::uniform_int_distribution<int> kind(0, 5);
    auto draw = [&]() -> qcomplex {
        switch (kind(rng)) {
            case 0:
            case 1: return qcomplex(std::polar(mod(rng), angle(rng)));
            case 2: return qcomplex(-mod(rng));
            default: return qcomplex(mod(rng));
        }
    };
    for (const auto& p : vocab) {
        w.set(p.name, draw());
        wbar.set(p.name, draw());
    }
}

}  // namespace liftcount::testing
