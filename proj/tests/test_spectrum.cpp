#include "doctest.h"

#include <cmath>
#include <random>

#include "liftcount/errors.hpp"
#include "liftcount/reference.hpp"
#include "liftcount/spectrum.hpp"
#include "support.hpp"

using namespace liftcount;

namespace {

double dbl(const real& x) { return static_cast<double>(x); }

std::vector<qcomplex> random_grid(std::mt19937_64& rng, const Grid& g) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<qcomplex> v(g.size());
    for (auto& z : v) z = qcomplex(real(u(rng)), real(u(rng)));
    return v;
}

// Direct O(|D|^2) transform, used as an oracle for the separable one.
std::vector<std::complex<double>> naive_dft(const Grid& g, const std::vector<qcomplex>& v) {
    std::vector<std::complex<double>> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto kk = g.index(k);
        std::complex<double> s = 0;
        for (std::size_t n = 0; n < g.size(); ++n) {
            auto nn = g.index(n);
            double phase = 0;
            for (std::size_t a = 0; a < g.rank(); ++a) {
                phase += static_cast<double>(kk[a] * nn[a]) / static_cast<double>(g.shape()[a]);
            }
            s += v[n].to_std() * std::polar(1.0, -2 * M_PI * phase);
        }
        out[k] = s;
    }
    return out;
}

}  // namespace

TEST_CASE("count statistics") {
    Vocabulary f{{"f", 2}};
    CountSpec psi({parse_formula("f(x,y)", f), parse_formula("f(x,x)", f)});
    Domain d(2);
    CHECK(count_statistics(psi, {{"f", {0, 0}}, {"f", {0, 1}}}, d) ==
          std::vector<std::size_t>{2, 1});
    CHECK(count_statistics(psi, {}, d) == std::vector<std::size_t>{0, 0});
    PossibleWorld full{{"f", {0, 0}}, {"f", {0, 1}}, {"f", {1, 0}}, {"f", {1, 1}}};
    CHECK(count_statistics(psi, full, d) == std::vector<std::size_t>{4, 2});
    CHECK(psi.shape(Domain(10)) == std::vector<std::size_t>{101, 11});
}

TEST_CASE("grid indexing") {
    Grid g({3, 1, 4});
    CHECK(g.size() == 12);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.flat(g.index(i)) == i);
    CHECK(g.index(5) == std::vector<std::size_t>{1, 0, 1});
    CHECK_THROWS(g.flat(std::vector<std::size_t>{3, 0, 0}));
}

TEST_CASE("dft") {
    std::mt19937_64 rng(1);
    for (auto shape : {std::vector<std::size_t>{5}, {3, 4}, {2, 3, 2}, {7, 1}}) {
        Grid g(shape);
        auto v = random_grid(rng, g);
        auto fast = forward_dft(g, v);
        auto slow = naive_dft(g, v);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(fast[i].to_std() - slow[i]) < 1e-12);
        auto back = inverse_dft(g, fast);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(dbl(abs(back[i] - v[i])) < 1e-30);
    }
    // point mass
    Grid g({4, 3});
    std::vector<qcomplex> delta(g.size());
    delta[g.flat(std::vector<std::size_t>{2, 1})] = 1;
    auto back = inverse_dft(g, forward_dft(g, delta));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(dbl(abs(back[i] - delta[i])) < 1e-30);
}

TEST_CASE("spectrum of a binomial") {
    Mln empty(Vocabulary{{"p", 1}});
    CountSpec psi({parse_formula("p(x)", empty.vocabulary())});
    for (std::size_t k = 0; k < 3; ++k) {
        std::complex<double> expected = 0;
        for (int j = 0; j <= 2; ++j) {
            const double c = j == 1 ? 2 : 1;
            expected += c / 4 * std::polar(1.0, -2 * M_PI * static_cast<double>(k) * j / 3);
        }
        auto got = spectrum_point(empty, psi, std::vector<std::size_t>{k}, Domain(2));
        CHECK(std::abs(got.to_std() - expected) < 1e-15);
    }
    auto q = count_distribution(empty, psi, Domain(2));
    CHECK(dbl(q.p[0]) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(dbl(q.p[1]) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dbl(q.p[2]) == doctest::Approx(0.25).epsilon(1e-15));

    auto q10 = count_distribution(empty, psi, Domain(10));
    double binom = 1;
    for (int j = 0; j <= 10; ++j) {
        CHECK(dbl(q10.p[j]) == doctest::Approx(binom / 1024).epsilon(1e-15));
        binom = binom * (10 - j) / (j + 1);
    }
}

TEST_CASE("point mass models") {
    Mln m(Vocabulary{{"p", 1}, {"r", 2}});
    m.add_hard(parse_formula("p(x) & !r(x,y)", m.vocabulary()));
    CountSpec psi({parse_formula("p(x)", m.vocabulary()), parse_formula("r(x,y)", m.vocabulary())});
    auto g = full_spectrum(m, psi, Domain(3));
    for (const auto& z : g.values) CHECK(dbl(abs(z)) == doctest::Approx(1).epsilon(1e-20));
    auto q = inverse_dft(g);
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        const bool at = q.grid.index(i) == std::vector<std::size_t>{3, 0};
        CHECK(dbl(q.p[i]) == doctest::Approx(at ? 1.0 : 0.0).epsilon(1e-20));
    }
}

TEST_CASE("residue checks") {
    Spectrum bad{Grid({3}), {qcomplex(1), qcomplex(real(0), real(1)), qcomplex(0)}};
    CHECK_THROWS_AS(inverse_dft(bad), residue_error);
    Spectrum negative{Grid({2}), {qcomplex(0), qcomplex(1)}};
    CHECK_THROWS_AS(inverse_dft(negative), residue_error);
}

TEST_CASE("csv output") {
    Mln empty(Vocabulary{{"p", 1}});
    CountSpec psi({parse_formula("p(x)", empty.vocabulary())});
    std::ostringstream q, g;
    write_distribution_csv(q, count_distribution(empty, psi, Domain(2)));
    CHECK(q.str() == "n_1,value\n0,0.25\n1,0.5\n2,0.25\n");
    write_spectrum_csv(g, full_spectrum(empty, psi, Domain(1)));
    CHECK(g.str() == "k_1,re,im\n0,1,0\n1,0,0\n");
}

TEST_CASE("property: distribution equals aggregated world probabilities") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> weight(-1.5, 1.5);
    for (int i = 0; i < 25; ++i) {
        Vocabulary v = testing::random_vocabulary(rng);
        Mln m(v);
        m.add(testing::random_matrix(rng, v, {"x", "y"}, 2), weight(rng));
        if (i % 3 == 0) m.add(testing::random_matrix(rng, v, {"x"}, 1), weight(rng));
        CountSpec psi;
        psi.add("a", testing::random_matrix(rng, v, {"x"}, 1));
        if (i % 2 == 0) psi.add("b", testing::random_matrix(rng, v, {"x", "y"}, 1));
        for (std::size_t n = 1; n <= 3; ++n) {
            Domain d(n);
            auto q = count_distribution(m, psi, d);
            ReferenceModel ref(m, d, {}, psi.formulas());
            const double z = ref.partition();
            auto mass = ref.count_mass();
            real total = 0;
            for (std::size_t j = 0; j < q.grid.size(); ++j) {
                auto it = mass.find(q.grid.index(j));
                const double expected = it == mass.end() ? 0.0 : it->second / z;
                CHECK(std::abs(dbl(q.p[j]) - expected) <= 1e-9);
                total += q.p[j];
            }
            CHECK(dbl(total) == doctest::Approx(1).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: zero frequency and conjugate symmetry") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> weight(-2, 2);
    for (int i = 0; i < 20; ++i) {
        Vocabulary v = testing::random_vocabulary(rng);
        Mln m(v);
        m.add(testing::random_matrix(rng, v, {"x", "y"}, 2), weight(rng));
        CountSpec psi;
        psi.add("a", testing::random_matrix(rng, v, {"x", "y"}, 1));
        Domain d(3);
        auto g = full_spectrum(m, psi, d);
        CHECK(dbl(abs(g.values[0] - qcomplex(1))) < 1e-25);
        const std::size_t mm = g.grid.shape()[0];
        for (std::size_t k = 0; k < mm; ++k) {
            CHECK(dbl(abs(g.values[(mm - k) % mm] - conj(g.values[k]))) < 1e-25);
        }
    }
}

TEST_CASE("property: marginalising an extended grid") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> weight(-2, 2);
    for (int i = 0; i < 10; ++i) {
        Vocabulary v = testing::random_vocabulary(rng);
        Mln m(v);
        m.add(testing::random_matrix(rng, v, {"x", "y"}, 2), weight(rng));
        CountSpec psi;
        psi.add("a", testing::random_matrix(rng, v, {"x"}, 2));
        CountSpec ext = psi;
        ext.add("gamma", testing::random_sentences(rng, v).front());
        Domain d(3);
        auto q = count_distribution(m, psi, d);
        auto qe = count_distribution(m, ext, d);
        for (std::size_t j = 0; j < q.grid.size(); ++j) {
            const real s = qe.at(std::vector<std::size_t>{j, 0}) + qe.at(std::vector<std::size_t>{j, 1});
            CHECK(dbl(boost::multiprecision::abs(s - q.p[j])) < 1e-20);
        }
    }
}
