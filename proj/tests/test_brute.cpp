#include "doctest.h"

#include <random>

#include "liftcount/brute.hpp"
#include "liftcount/errors.hpp"
#include "support.hpp"

using namespace liftcount;

namespace {

double err(std::complex<double> a, std::complex<double> b) {
    return std::abs(a - b) / (1 + std::abs(b));
}

}  // namespace

TEST_CASE("world enumeration") {
    CHECK(enumerate_worlds({{"p", 1}}, Domain(3)).size() == 8);
    auto worlds = enumerate_worlds({{"f", 2}}, Domain(2));
    CHECK(worlds.size() == 16);
    CHECK(worlds[0].size() == 0);
    CHECK(worlds[15].size() == 4);
    // atom order: f(0,0), f(0,1), f(1,0), f(1,1)
    CHECK(worlds[2].contains({"f", {0, 1}}));
    CHECK(worlds[4].contains({"f", {1, 0}}));
    try {
        WorldSpace space({{"f", 2}}, Domain(6));
        FAIL("expected refusal");
    } catch (const brute_cap_error& e) {
        CHECK(e.atoms() == 36);
    }
}

TEST_CASE("brute wfomc basics") {
    Vocabulary p{{"p", 1}};
    CHECK(brute_wfomc({}, p, {}, {}, Domain(3)) == std::complex<double>(8));
    WeightFunction w{{"p", qcomplex(2)}};
    CHECK(brute_wfomc({Formula::top()}, p, w, {}, Domain(3)) == std::complex<double>(27));

    Vocabulary f{{"f", 2}};
    auto total = parse_formula("forall x exists y f(x,y)", f);
    CHECK(brute_wfomc({total}, f, {}, {}, Domain(2)) == std::complex<double>(9));
    CHECK(brute_wfomc({total}, f, {}, {}, Domain(3)) == std::complex<double>(343));
    CHECK(brute_wfomc({Formula::bottom()}, f, {}, {}, Domain(2)) == std::complex<double>(0));
}

TEST_CASE("ground circuit agrees with tree evaluation") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 60; ++i) {
        auto vocab = testing::random_vocabulary(rng);
        auto sentences = testing::random_sentences(rng, vocab);
        Domain d(2);
        WorldSpace space(vocab, d);
        for (const auto& s : sentences) {
            GroundCircuit c(s, space.atoms());
            for (std::uint64_t m = 0; m < space.count(); m += 3) {
                CHECK(c.evaluate(m) == evaluate(s, space.world(m), d));
            }
            for (std::uint64_t base = 0; base < space.count(); base += 64) {
                const std::uint64_t sliced = c.evaluate64(base);
                for (std::uint64_t j = 0; j < 64 && base + j < space.count(); ++j) {
                    CHECK(((sliced >> j) & 1U) == (c.evaluate(base + j) ? 1U : 0U));
                }
            }
        }
    }
}

TEST_CASE("equality and three variables are brute-force only features") {
    Vocabulary f{{"f", 2}};
    auto functional = parse_formula("forall x, y, z f(x,y) & f(x,z) -> y = z", f, {3});
    auto total = parse_formula("forall x exists y f(x,y)", f);
    // functions on n elements: n^n
    CHECK(brute_wfomc({functional, total}, f, {}, {}, Domain(2)) == std::complex<double>(4));
    CHECK(brute_wfomc({functional, total}, f, {}, {}, Domain(3)) == std::complex<double>(27));
}

TEST_CASE("property: all-ones weights count models") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 40; ++i) {
        auto vocab = testing::random_vocabulary(rng);
        auto sentences = testing::random_sentences(rng, vocab);
        Domain d(2);
        auto z = brute_wfomc(sentences, vocab, {}, {}, d);
        std::size_t models = 0;
        for (const auto& w : enumerate_worlds(vocab, d)) {
            bool ok = true;
            for (const auto& s : sentences) ok = ok && evaluate(s, w, d);
            models += ok ? 1 : 0;
        }
        CHECK(z.imag() == 0);
        CHECK(z.real() == doctest::Approx(static_cast<double>(models)).epsilon(1e-12));
    }
}

TEST_CASE("property: multiplicativity over disjoint vocabularies") {
    std::mt19937_64 rng(9);
    Vocabulary va{{"a", 1}, {"s", 2}};
    Vocabulary vb{{"b", 1}};
    Vocabulary both{{"a", 1}, {"s", 2}, {"b", 1}};
    for (int i = 0; i < 20; ++i) {
        auto ga = testing::random_sentences(rng, va);
        auto gb = testing::random_sentences(rng, vb);
        WeightFunction w, wbar;
        testing::random_weights(rng, both, w, wbar);
        Domain d(2);
        auto joint = ga;
        joint.insert(joint.end(), gb.begin(), gb.end());
        auto lhs = brute_wfomc(joint, both, w, wbar, d);
        auto rhs = brute_wfomc(ga, va, w, wbar, d) * brute_wfomc(gb, vb, w, wbar, d);
        CHECK(err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("property: splitting on one ground atom") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        Vocabulary vocab{{"p0", 1}, {"r", 2}};
        auto gamma = testing::random_sentences(rng, vocab);
        WeightFunction w, wbar;
        testing::random_weights(rng, vocab, w, wbar);
        Domain d(2);
        Formula atom = Formula::atom("r", {Term::elem(0), Term::elem(1)});
        auto with = gamma;
        with.push_back(atom);
        auto without = gamma;
        without.push_back(!atom);
        CHECK(err(brute_wfomc(with, vocab, w, wbar, d) + brute_wfomc(without, vocab, w, wbar, d),
                  brute_wfomc(gamma, vocab, w, wbar, d)) < 1e-12);
    }
}

TEST_CASE("property: conjugating weights conjugates the count") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        auto vocab = testing::random_vocabulary(rng);
        auto gamma = testing::random_sentences(rng, vocab);
        WeightFunction w, wbar, cw, cwbar;
        testing::random_weights(rng, vocab, w, wbar);
        for (const auto& [k, v] : w.entries()) cw.set(k, conj(v));
        for (const auto& [k, v] : wbar.entries()) cwbar.set(k, conj(v));
        Domain d(2);
        CHECK(err(brute_wfomc(gamma, vocab, cw, cwbar, d),
                  std::conj(brute_wfomc(gamma, vocab, w, wbar, d))) < 1e-12);
    }
}
