#include "liftcount/constraints.hpp"

#include <algorithm>
#include <stdexcept>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "liftcount/errors.hpp"

namespace liftcount {

struct CardinalityPredicate::Node {
    struct Equals {
        std::size_t dim, value;
    };
    struct Between {
        std::size_t dim, lo, hi;
    };
    struct And {
        std::vector<CardinalityPredicate> parts;
    };
    struct Fn {
        Custom f;
        std::size_t arity;
        std::string label;
        std::size_t offset;
    };
    std::variant<And, Equals, Between, Fn> v;
};

CardinalityPredicate::CardinalityPredicate()
    : node_(std::make_shared<const Node>(Node{Node::And{}})) {}

CardinalityPredicate CardinalityPredicate::equals(std::size_t dim, std::size_t value) {
    return CardinalityPredicate(std::make_shared<const Node>(Node{Node::Equals{dim, value}}));
}

CardinalityPredicate CardinalityPredicate::between(std::size_t dim, std::size_t lo, std::size_t hi) {
    return CardinalityPredicate(std::make_shared<const Node>(Node{Node::Between{dim, lo, hi}}));
}

CardinalityPredicate CardinalityPredicate::conjunction(std::vector<CardinalityPredicate> parts) {
    std::vector<CardinalityPredicate> flat;
    for (auto& p : parts) {
        if (p.is_tautology()) continue;
        if (auto* a = std::get_if<Node::And>(&p.node_->v)) {
            flat.insert(flat.end(), a->parts.begin(), a->parts.end());
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.size() == 1) return flat.front();
    return CardinalityPredicate(std::make_shared<const Node>(Node{Node::And{std::move(flat)}}));
}

CardinalityPredicate CardinalityPredicate::custom(Custom f, std::size_t arity, std::string label) {
    return CardinalityPredicate(
        std::make_shared<const Node>(Node{Node::Fn{std::move(f), arity, std::move(label), 0}}));
}

bool CardinalityPredicate::operator()(std::span<const std::size_t> n) const {
    if (n.size() < arity()) throw std::invalid_argument("count vector shorter than predicate");
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::Equals>) {
                return n[x.dim] == x.value;
            } else if constexpr (std::is_same_v<T, Node::Between>) {
                return x.lo <= n[x.dim] && n[x.dim] <= x.hi;
            } else if constexpr (std::is_same_v<T, Node::And>) {
                return std::all_of(x.parts.begin(), x.parts.end(),
                                   [&](const CardinalityPredicate& p) { return p(n); });
            } else {
                return x.f(n.subspan(x.offset));
            }
        },
        node_->v);
}

std::size_t CardinalityPredicate::arity() const {
    return std::visit(
        [](const auto& x) -> std::size_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::And>) {
                std::size_t a = 0;
                for (const auto& p : x.parts) a = std::max(a, p.arity());
                return a;
            } else if constexpr (std::is_same_v<T, Node::Fn>) {
                return x.offset + x.arity;
            } else {
                return x.dim + 1;
            }
        },
        node_->v);
}

bool CardinalityPredicate::is_tautology() const {
    auto* a = std::get_if<Node::And>(&node_->v);
    return a != nullptr && a->parts.empty();
}

CardinalityPredicate CardinalityPredicate::shifted(std::size_t offset) const {
    return std::visit(
        [&](const auto& x) -> CardinalityPredicate {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::Equals>) {
                return equals(x.dim + offset, x.value);
            } else if constexpr (std::is_same_v<T, Node::Between>) {
                return between(x.dim + offset, x.lo, x.hi);
            } else if constexpr (std::is_same_v<T, Node::And>) {
                std::vector<CardinalityPredicate> parts;
                for (const auto& p : x.parts) parts.push_back(p.shifted(offset));
                return conjunction(std::move(parts));
            } else {
                return CardinalityPredicate(std::make_shared<const Node>(
                    Node{Node::Fn{x.f, x.arity, x.label, x.offset + offset}}));
            }
        },
        node_->v);
}

std::vector<std::size_t> CardinalityPredicate::dims() const {
    std::vector<std::size_t> out;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::And>) {
                for (const auto& p : x.parts) {
                    auto d = p.dims();
                    out.insert(out.end(), d.begin(), d.end());
                }
            } else if constexpr (std::is_same_v<T, Node::Fn>) {
                for (std::size_t i = 0; i < x.arity; ++i) out.push_back(x.offset + i);
            } else {
                out.push_back(x.dim);
            }
        },
        node_->v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CardinalityPredicate CardinalityPredicate::remapped(std::span<const std::size_t> old_to_new) const {
    return std::visit(
        [&](const auto& x) -> CardinalityPredicate {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::Equals>) {
                return equals(old_to_new[x.dim], x.value);
            } else if constexpr (std::is_same_v<T, Node::Between>) {
                return between(old_to_new[x.dim], x.lo, x.hi);
            } else if constexpr (std::is_same_v<T, Node::And>) {
                std::vector<CardinalityPredicate> parts;
                for (const auto& p : x.parts) parts.push_back(p.remapped(old_to_new));
                return conjunction(std::move(parts));
            } else {
                // a custom predicate reads a contiguous block, which stays contiguous
                return CardinalityPredicate(std::make_shared<const Node>(
                    Node{Node::Fn{x.f, x.arity, x.label, old_to_new[x.offset]}}));
            }
        },
        node_->v);
}

std::string CardinalityPredicate::to_string() const {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::Equals>) {
                return "n" + std::to_string(x.dim + 1) + " == " + std::to_string(x.value);
            } else if constexpr (std::is_same_v<T, Node::Between>) {
                return "n" + std::to_string(x.dim + 1) + " in " + std::to_string(x.lo) + ".." +
                       std::to_string(x.hi);
            } else if constexpr (std::is_same_v<T, Node::And>) {
                if (x.parts.empty()) return "true";
                std::string s;
                for (const auto& p : x.parts) s += (s.empty() ? "" : " & ") + p.to_string();
                return s;
            } else {
                return x.label;
            }
        },
        node_->v);
}

void CardinalityConstraint::validate() const {
    if (g.arity() > psi.size()) {
        throw std::invalid_argument("cardinality predicate reads " + std::to_string(g.arity()) +
                                    " counts but only " + std::to_string(psi.size()) +
                                    " are specified");
    }
}

CardinalityConstraint project(const CardinalityConstraint& cc) {
    cc.validate();
    std::vector<std::size_t> old_to_new(cc.psi.size(), 0);
    CardinalityConstraint out;
    for (auto d : cc.g.dims()) {
        old_to_new[d] = out.psi.size();
        out.psi.add(cc.psi.name(d), cc.psi.formula(d));
    }
    out.g = cc.g.remapped(old_to_new);
    return out;
}

CardinalityConstraint combine(const CardinalityConstraint& a, const CardinalityConstraint& b) {
    CardinalityConstraint out{a.psi, {}};
    for (std::size_t i = 0; i < b.psi.size(); ++i) out.psi.add(b.psi.name(i), b.psi.formula(i));
    out.g = CardinalityPredicate::conjunction({a.g, b.g.shifted(a.psi.size())});
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Surviving {
    real mass = 0;
    real noise = 0;  // summed resolution of the surviving grid points
};

Surviving surviving_mass(const CountDistribution& q, const CardinalityPredicate& g) {
    Surviving s;
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        if (!g(q.grid.index(i))) continue;
        s.mass += q.p[i];
        s.noise += q.resolution;
    }
    return s;
}

void require_feasible(const Surviving& s) {
    const real floor = s.noise;
    if (s.mass <= floor) {
        throw infeasible_error("cardinality constraint leaves mass " + format_number(s.mass) +
                               " of the distribution, not above its resolution " +
                               format_number(floor) +
                               "; no world survives or the surviving mass is too small to resolve");
    }
}

}  // namespace

real constrained_partition(const Mln& phi, const CardinalityConstraint& full, Domain d) {
    const CardinalityConstraint cc = project(full);
    if (cc.psi.empty()) return partition_function(phi, d).value;
    CountDistribution q = count_distribution(phi, cc.psi, d);
    const Surviving s = surviving_mass(q, cc.g);
    require_feasible(s);
    return q.partition * s.mass;
}

real constrained_marginal(const Mln& phi, const CardinalityConstraint& full, const Formula& gamma,
                          Domain d) {
    const CardinalityConstraint cc = project(full);
    if (!free_variables(gamma).empty()) {
        throw std::invalid_argument("query must be a sentence: " + to_string(gamma));
    }
    if (cc.psi.empty()) return marginal(phi, gamma, d);
    CountSpec ext = cc.psi;
    ext.add("query", gamma);
    CountDistribution q = count_distribution(phi, ext, d);
    const std::size_t last = ext.size() - 1;
    real num = 0;
    Surviving den;
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        auto n = q.grid.index(i);
        if (!cc.g(n)) continue;
        den.mass += q.p[i];
        den.noise += q.resolution;
        if (n[last] == 1) num += q.p[i];
    }
    require_feasible(den);
    real p = num / den.mass;
    return std::clamp(p, real(0), real(1));
}

CountDistribution constrained_distribution(const Mln& phi, const CardinalityConstraint& cc,
                                           Domain d) {
    cc.validate();
    CountDistribution q = count_distribution(phi, cc.psi, d);
    const Surviving s = surviving_mass(q, cc.g);
    require_feasible(s);
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        q.p[i] = cc.g(q.grid.index(i)) ? q.p[i] / s.mass : real(0);
    }
    q.partition *= s.mass;
    q.resolution /= s.mass;
    return q;
}

// ---------------------------------------------------------------------------

namespace {

Formula binary_atom(const std::string& r, const char* a, const char* b) {
    return Formula::atom(r, {Term::var(a), Term::var(b)});
}

}  // namespace

FunctionRewrite rewrite_function_constraints(const std::vector<FunctionConstraint>& fcs,
                                             Domain d) {
    FunctionRewrite out;
    std::vector<CardinalityPredicate> parts;
    for (const auto& fc : fcs) {
        out.hard.push_back(
            Formula::forall("x", Formula::exists("y", binary_atom(fc.relation, "x", "y"))));
        parts.push_back(CardinalityPredicate::equals(out.constraint.psi.size(), d.size()));
        out.constraint.psi.add("|" + fc.relation + "|", binary_atom(fc.relation, "x", "y"));
    }
    out.constraint.g = CardinalityPredicate::conjunction(std::move(parts));
    return out;
}

Formula functionality_sentence(const std::string& relation) {
    Formula total = Formula::forall("x", Formula::exists("y", binary_atom(relation, "x", "y")));
    Formula single = Formula::forall(
        "x", Formula::forall(
                 "y", Formula::forall(
                          "z", Formula::implication(binary_atom(relation, "x", "y") &&
                                                        binary_atom(relation, "x", "z"),
                                                    Formula::equality(Term::var("y"),
                                                                      Term::var("z"))))));
    return total && single;
}

std::vector<FixedPointRow> fixed_point_distribution(std::size_t n) {
    if (n == 0) throw std::invalid_argument("domain size must be positive");
    Mln phi(Vocabulary{{"f", 2}});
    phi.add_hard(Formula::forall("x", Formula::exists("y", binary_atom("f", "x", "y"))));
    CountSpec psi;
    psi.add("|f|", binary_atom("f", "x", "y"));
    psi.add("fixed", binary_atom("f", "x", "x"));
    CountDistribution q = count_distribution(phi, psi, Domain(n));
    Surviving z;
    for (std::size_t j = 0; j <= n; ++j) {
        z.mass += q.at(std::vector<std::size_t>{n, j});
        z.noise += q.resolution;
    }
    require_feasible(z);
    std::vector<FixedPointRow> rows;
    for (std::size_t k = 0; k <= n; ++k) {
        rows.push_back(
            {k, q.at(std::vector<std::size_t>{n, k}) / z.mass, analytic_fixed_points(n, k)});
    }
    return rows;
}

real analytic_fixed_points(std::size_t n, std::size_t k) {
    using boost::multiprecision::cpp_int;
    if (n == 0 || k > n) throw std::invalid_argument("need 0 <= k <= n and n >= 1");
    cpp_int binom = 1;
    for (std::size_t i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
    cpp_int num = binom * boost::multiprecision::pow(cpp_int(n - 1), static_cast<unsigned>(n - k));
    cpp_int den = boost::multiprecision::pow(cpp_int(n), static_cast<unsigned>(n));
    return real(num.str()) / real(den.str());
}

}  // namespace liftcount
