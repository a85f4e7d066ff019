#include "doctest.h"

#include <cmath>
#include <random>

#include "liftcount/errors.hpp"
#include "liftcount/mln.hpp"
#include "liftcount/reference.hpp"
#include "support.hpp"

using namespace liftcount;

namespace {

double dbl(const real& x) { return static_cast<double>(x); }

Formula parse(const std::string& s, const Mln& m) { return parse_formula(s, m.vocabulary()); }

// Soft formulas only, with 0, 1 or 2 free variables.
Mln random_mln(std::mt19937_64& rng) {
    Mln m(testing::random_vocabulary(rng));
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> weight(-1.5, 1.5);
    std::uniform_int_distribution<int> vars(0, 2);
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
        const int v = vars(rng);
        if (v == 0) {
            m.add(testing::random_sentences(rng, m.vocabulary()).front(), weight(rng));
            continue;
        }
        std::vector<std::string> names = {"x", "y"};
        names.resize(v);
        m.add(testing::random_matrix(rng, m.vocabulary(), names, 2), weight(rng));
    }
    return m;
}

}  // namespace

TEST_CASE("translation") {
    Mln empty(Vocabulary{{"p", 1}});
    auto t = translate_mln(empty);
    CHECK(t.gamma.empty());
    CHECK(t.indicators.empty());

    Mln m(Vocabulary{{"p", 1}, {"f", 2}});
    m.add(parse("p(x)", m), std::log(2.0));
    m.add_hard(parse("forall x exists y f(x,y)", m));
    t = translate_mln(m);
    REQUIRE(t.indicators.size() == 1);
    CHECK(t.vocabulary.find(t.indicators[0])->arity == 1);
    CHECK(dbl(t.w(t.indicators[0]).re) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(t.wbar(t.indicators[0]) == qcomplex(1));
    REQUIRE(t.gamma.size() == 2);
    CHECK(t.gamma[1] == parse("forall x exists y f(x,y)", m));
    CHECK(free_variables(t.gamma[0]).empty());

    Mln nullary(Vocabulary{{"p", 1}});
    nullary.add(parse("exists x p(x)", nullary), 1.0);
    t = translate_mln(nullary);
    CHECK(t.vocabulary.find(t.indicators[0])->arity == 0);
}

TEST_CASE("partition function") {
    Mln empty(Vocabulary{{"p", 1}});
    CHECK(dbl(partition_function(empty, Domain(5)).value) == 32);

    Mln one(Vocabulary{{"p", 1}});
    one.add(parse("p(x)", one), std::log(2.0));
    CHECK(dbl(partition_function(one, Domain(3)).value) == doctest::Approx(27).epsilon(1e-14));

    Mln zero(Vocabulary{{"p", 1}});
    zero.add(parse("p(x)", zero), 0.0);
    CHECK(dbl(partition_function(zero, Domain(4)).value) == doctest::Approx(16).epsilon(1e-14));

    Mln hard(Vocabulary{{"f", 2}});
    hard.add_hard(parse("forall x exists y f(x,y)", hard));
    CHECK(dbl(partition_function(hard, Domain(2)).value) == doctest::Approx(9).epsilon(1e-14));

    Mln contradiction(Vocabulary{{"p", 1}});
    contradiction.add_hard(parse("p(x)", contradiction));
    contradiction.add_hard(parse("exists x !p(x)", contradiction));
    CHECK_THROWS_AS(partition_function(contradiction, Domain(3)), infeasible_error);
}

TEST_CASE("marginals") {
    Mln empty(Vocabulary{{"p", 1}});
    CHECK(dbl(marginal(empty, parse("exists x p(x)", empty), Domain(1))) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dbl(marginal(empty, parse("forall x p(x)", empty), Domain(3))) ==
          doctest::Approx(0.125).epsilon(1e-15));
    Mln one(Vocabulary{{"p", 1}});
    one.add(parse("p(x)", one), std::log(2.0));
    CHECK(dbl(marginal(one, parse("exists x p(x)", one), Domain(1))) ==
          doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK_THROWS_AS(marginal(one, parse("p(x)", one), Domain(1)), std::invalid_argument);
}

TEST_CASE("mln validation") {
    Mln m(Vocabulary{{"p", 1}});
    CHECK_THROWS_AS(m.add(Formula::atom("q", {Term::var("x")}), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(m.add(Formula::atom("p", {Term::var("x")}), std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(m.add(Formula::atom("p", {Term::var("x")}), -kHardWeight),
                    std::invalid_argument);
}

TEST_CASE("property: lifted partition function matches direct enumeration") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 40; ++i) {
        Mln m = random_mln(rng);
        for (std::size_t n = 1; n <= 3; ++n) {
            ReferenceModel ref(m, Domain(n));
            const double expected = ref.partition();
            const double got = dbl(partition_function(m, Domain(n)).value);
            CHECK(std::abs(got - expected) <= 1e-9 * (1 + expected));
        }
    }
}

TEST_CASE("property: complementary marginals sum to one") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 30; ++i) {
        Mln m = random_mln(rng);
        auto gamma = testing::random_sentences(rng, m.vocabulary());
        Formula g = gamma.front();
        for (std::size_t n = 1; n <= 3; ++n) {
            const real a = marginal(m, g, Domain(n));
            const real b = marginal(m, !g, Domain(n));
            CHECK(dbl(a + b) == doctest::Approx(1).epsilon(1e-9));
            ReferenceModel ref(m, Domain(n));
            CHECK(dbl(a) == doctest::Approx(ref.mass(g) / ref.partition()).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: zero-weight formulas change nothing") {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 20; ++i) {
        Mln m = random_mln(rng);
        Mln padded = m;
        padded.add(testing::random_matrix(rng, m.vocabulary(), {"x", "y"}, 2), 0.0);
        Formula g = conjoin(testing::random_sentences(rng, m.vocabulary()));
        for (std::size_t n = 1; n <= 4; ++n) {
            CHECK(dbl(marginal(m, g, Domain(n))) ==
                  doctest::Approx(dbl(marginal(padded, g, Domain(n)))).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: formula order and predicate names do not matter") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 20; ++i) {
        Mln m = random_mln(rng);
        Mln reversed(m.vocabulary());
        for (auto it = m.formulas().rbegin(); it != m.formulas().rend(); ++it) {
            reversed.add(it->formula, it->weight);
        }
        // rename every predicate p to p_
        Vocabulary renamed_vocab;
        for (const auto& p : m.vocabulary()) renamed_vocab.add({p.name + "_", p.arity});
        Mln renamed(renamed_vocab);
        for (const auto& wf : m.formulas()) {
            std::string text = to_string(wf.formula);
            for (const auto& p : m.vocabulary()) {
                for (std::size_t pos = text.find(p.name + "("); pos != std::string::npos;
                     pos = text.find(p.name + "(", pos + p.name.size() + 2)) {
                    text.insert(pos + p.name.size(), "_");
                }
            }
            renamed.add(parse_formula(text, renamed_vocab), wf.weight);
        }
        for (std::size_t n = 1; n <= 5; ++n) {
            const double z = dbl(partition_function(m, Domain(n)).value);
            CHECK(dbl(partition_function(reversed, Domain(n)).value) ==
                  doctest::Approx(z).epsilon(1e-12));
            CHECK(dbl(partition_function(renamed, Domain(n)).value) ==
                  doctest::Approx(z).epsilon(1e-12));
        }
    }
}

TEST_CASE("hard formulas zero out violating worlds") {
    Mln m(Vocabulary{{"p", 1}, {"r", 2}});
    m.add(parse_formula("p(x) & r(x,y) -> p(y)", m.vocabulary()), 0.7);
    m.add_hard(parse_formula("r(x,y) -> r(y,x)", m.vocabulary()));
    ReferenceModel ref(m, Domain(2));
    GroundCircuit sym(universal_closure(parse_formula("r(x,y) -> r(y,x)", m.vocabulary())),
                      ref.space().atoms());
    std::size_t excluded = 0;
    for (std::uint64_t w = 0; w < ref.world_count(); ++w) {
        if (!sym.evaluate(w)) {
            CHECK_FALSE(ref.weight(w).has_value());
            ++excluded;
        }
    }
    CHECK(excluded > 0);
    // the lifted Z only sees the surviving worlds
    CHECK(dbl(partition_function(m, Domain(2)).value) ==
          doctest::Approx(ref.partition()).epsilon(1e-12));
}
