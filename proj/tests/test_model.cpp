#include "doctest.h"

#include <cmath>

#include "liftcount/errors.hpp"
#include "liftcount/model.hpp"

using namespace liftcount;

namespace {

// Returns "line:column" of the diagnostic, or "" if parsing succeeds.
std::string error_at(const std::string& text) {
    try {
        parse_model(text);
    } catch (const parse_error& e) {
        return std::to_string(e.line()) + ":" + std::to_string(e.column());
    }
    return "";
}

}  // namespace

TEST_CASE("fixed-point model") {
    Model m = parse_model(
        "# random functions\n"
        "domain 10\n"
        "predicate f/2\n"
        "function f\n"
        "count edges : f(x,y)\n"
        "count fixed : f(x,x)   # loops\n"
        "query some : exists x f(x,x)\n");
    REQUIRE(m.domain);
    CHECK(m.domain->size() == 10);
    CHECK(m.mln.formulas().empty());
    CHECK(m.counts.size() == 2);
    CHECK(m.counts.name(1) == "fixed");
    CHECK(m.functions.size() == 1);
    CHECK(m.constrained());

    Problem p = lifted_problem(m);
    REQUIRE(p.mln.formulas().size() == 1);
    CHECK(p.mln.formulas()[0].hard());
    CHECK(p.mln.formulas()[0].formula ==
          parse_formula("forall x exists y f(x,y)", m.vocabulary()));
    CHECK(p.constraint.psi.size() == 3);
    CHECK(p.constraint.g(std::vector<std::size_t>{10, 3, 10}));
    CHECK_FALSE(p.constraint.g(std::vector<std::size_t>{10, 3, 9}));
}

TEST_CASE("weights, odds and cardinalities") {
    Model m = parse_model(
        "domain 3\npredicate p/1\npredicate r/2\n"
        "weight -1.5e-1 : p(x) -> r(x,y)\n"
        "odds 4 : p(x)\n"
        "hard : r(x,y) -> r(y,x)\n"
        "count ps : p(x)\n"
        "count rs : r(x,y)\n"
        "cardinality ps in 1..2\n"
        "cardinality rs == 4\n");
    REQUIRE(m.mln.formulas().size() == 3);
    CHECK(m.mln.formulas()[0].weight == -0.15);
    CHECK(m.mln.formulas()[1].weight == doctest::Approx(std::log(4.0)));
    CHECK(m.mln.formulas()[2].hard());
    CHECK(m.cardinality(std::vector<std::size_t>{2, 4}));
    CHECK_FALSE(m.cardinality(std::vector<std::size_t>{0, 4}));
    CHECK_FALSE(m.cardinality(std::vector<std::size_t>{1, 3}));
    CHECK(m.cardinality.to_string() == "n1 in 1..2 & n2 == 4");
    CHECK_FALSE(parse_model("domain 1\npredicate p/1\n").constrained());
}

TEST_CASE("diagnostics carry line and column") {
    CHECK(error_at("predicate p/3\n") == "1:13");
    CHECK(error_at("predicate p/1\nweight 1 : q(x)\n") == "2:12");
    CHECK(error_at("predicate p/1\nweight 1 : p(x,y)\n") == "2:12");
    CHECK(error_at("predicate p/1\nhard : p(x) & p(y) & p(z)\n") == "2:24");
    CHECK(error_at("predicate p/1\nhard : p(x) &\n") == "2:14");
    CHECK(error_at("domain 0\n") == "1:8");
    CHECK(error_at("domain 2\ndomain 3\n") == "2:1");
    CHECK(error_at("predicate p/1\npredicate p/2\n") == "2:11");
    CHECK(error_at("\n\n  frobnicate\n") == "3:3");
    CHECK(error_at("predicate p/1\nweight abc : p(x)\n") == "2:8");
    CHECK(error_at("predicate p/1\nodds -2 : p(x)\n") == "2:6");
    CHECK(error_at("predicate p/1\ncardinality c == 1\n") == "2:13");
    CHECK(error_at("predicate p/1\ncount c : p(x)\ncardinality c = 1\n") == "3:15");
    CHECK(error_at("predicate p/1\ncount c : p(x)\ncardinality c in 3..1\n") == "3:15");
    CHECK(error_at("predicate p/1\ncount c : p(x)\ncardinality c in 1..x\n") == "3:21");
    CHECK(error_at("predicate p/1\nfunction p\n") == "2:10");
    CHECK(error_at("predicate p/1\nfunction q\n") == "2:10");
    CHECK(error_at("predicate p/1\nquery q : p(x)\n") == "2:11");
    CHECK(error_at("predicate p/1\ncount c : p(x)\ncount c : p(x)\n") == "3:7");
    CHECK(error_at("domain 3 4\n") == "1:10");
    CHECK(error_at("predicate P/1\n") == "1:11");
}

TEST_CASE("lifted problem needs a domain") {
    CHECK_THROWS_AS(lifted_problem(parse_model("predicate p/1\n")), std::invalid_argument);
}
