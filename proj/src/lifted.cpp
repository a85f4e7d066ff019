#include "liftcount/lifted.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "liftcount/errors.hpp"

namespace liftcount {

using boost::multiprecision::cpp_int;

namespace {

std::string fresh_name(const Vocabulary& vocab, const std::string& stem, int& counter) {
    std::string name;
    do {
        name = "$" + stem + std::to_string(++counter);
    } while (vocab.contains(name));
    return name;
}

Formula var_atom(const std::string& pred, std::initializer_list<const char*> vars) {
    std::vector<Term> args;
    for (const char* v : vars) args.push_back(Term::var(v));
    return Formula::atom(pred, std::move(args));
}

// ---------------------------------------------------------------------------
// Normalisation

class Normalizer {
public:
    explicit Normalizer(const Vocabulary& vocab) { theory_.vocabulary = vocab; }

    void add_sentence(const Formula& f) {
        if (!free_variables(f).empty()) {
            throw unsupported_error("lifted engine needs closed sentences; '" + to_string(f) +
                                    "' has free variables");
        }
        if (mentions_constants(f)) {
            throw unsupported_error("lifted engine does not support constants or element terms: " +
                                    to_string(f));
        }
        if (mentions_equality(f)) {
            throw unsupported_error("lifted engine does not support equality atoms: " +
                                    to_string(f));
        }
        if (all_variables(f).size() > 2) {
            throw unsupported_error("more than two variables: " + to_string(f));
        }
        add_closed(f);
    }

    Fo2Theory take() { return std::move(theory_); }

private:
    void emit(Prefix p, Formula m) { theory_.sentences.push_back({p, std::move(m)}); }

    void add_closed(const Formula& f) {
        if (f.kind() == NodeKind::truth) return;
        if (f.kind() == NodeKind::conjunction) {
            add_closed(f.child(0));
            add_closed(f.child(1));
            return;
        }
        if (f.kind() == NodeKind::forall) {
            const std::string& u = f.variable();
            const Formula& body = f.child(0);
            if (body.is_quantifier() && body.variable() != u) {
                const std::string& v = body.variable();
                Formula m = rename_variables(replace(body.child(0)), {{u, "x"}, {v, "y"}});
                emit(body.kind() == NodeKind::forall ? Prefix::forall_xy : Prefix::forall_exists,
                     std::move(m));
                return;
            }
            emit(Prefix::forall_x, rename_variables(replace(body), {{u, "x"}}));
            return;
        }
        if (f.kind() == NodeKind::exists) {
            emit(Prefix::exists_x, rename_variables(replace(f.child(0)), {{f.variable(), "x"}}));
            return;
        }
        emit(Prefix::none, replace(f));
    }

    // Quantifier-free equivalent of f, introducing defined predicates for
    // every quantified subformula (innermost first).
    Formula replace(const Formula& f) {
        switch (f.kind()) {
            case NodeKind::truth:
            case NodeKind::falsity:
            case NodeKind::atom:
                return f;
            case NodeKind::negation:
                return Formula::negation(replace(f.child(0)));
            case NodeKind::conjunction:
                return Formula::conjunction(replace(f.child(0)), replace(f.child(1)));
            case NodeKind::disjunction:
                return Formula::disjunction(replace(f.child(0)), replace(f.child(1)));
            case NodeKind::implication:
                return Formula::implication(replace(f.child(0)), replace(f.child(1)));
            case NodeKind::equivalence:
                return Formula::equivalence(replace(f.child(0)), replace(f.child(1)));
            case NodeKind::forall:
            case NodeKind::exists:
                break;
            case NodeKind::equality:
                throw unsupported_error("equality atoms are not supported by the lifted engine");
        }
        const bool universal = f.kind() == NodeKind::forall;
        const std::string& v = f.variable();
        Formula body = replace(f.child(0));
        auto outer = free_variables(body);
        outer.erase(v);

        if (outer.empty()) {
            std::string a = fresh_name(theory_.vocabulary, "aux", counter_);
            theory_.vocabulary.add({a, 0});
            Formula atom = Formula::atom(a, {});
            Formula m = rename_variables(body, {{v, "x"}});
            if (universal) {
                emit(Prefix::forall_x, Formula::implication(atom, m));
                emit(Prefix::exists_x, Formula::implication(!atom, !m));
            } else {
                emit(Prefix::forall_x, Formula::implication(m, atom));
                emit(Prefix::exists_x, Formula::implication(atom, m));
            }
            return atom;
        }
        const std::string u = *outer.begin();
        std::string a = fresh_name(theory_.vocabulary, "aux", counter_);
        theory_.vocabulary.add({a, 1});
        Formula ax = var_atom(a, {"x"});
        Formula m = rename_variables(body, {{u, "x"}, {v, "y"}});
        if (universal) {
            emit(Prefix::forall_xy, Formula::implication(ax, m));
            emit(Prefix::forall_exists, Formula::implication(!ax, !m));
        } else {
            emit(Prefix::forall_xy, Formula::implication(m, ax));
            emit(Prefix::forall_exists, Formula::implication(ax, m));
        }
        return Formula::atom(a, {Term::var(u)});
    }

    Fo2Theory theory_;
    int counter_ = 0;
};

// ---------------------------------------------------------------------------
// Local evaluation of a quantifier-free matrix over two elements.
//
// Bit layout of a local mask, with U unary and B binary predicates:
//   [0, U)          P(x)
//   [U, 2U)         P(y)
//   [2U, 2U+B)      R(x,x)
//   [2U+B, 2U+2B)   R(y,y)
//   [2U+2B, 2U+3B)  R(x,y)
//   [2U+3B, 2U+4B)  R(y,x)
// A cell is U unary bits followed by B reflexive bits; a cross assignment
// is B bits R(a,b) followed by B bits R(b,a).

class LocalLayout {
public:
    LocalLayout(std::vector<std::string> unary, std::vector<std::string> binary)
        : unary_(std::move(unary)), binary_(std::move(binary)) {
        if (2 * unary_.size() + 4 * binary_.size() > 64) {
            throw unsupported_error("too many predicates for the lifted engine (" +
                                    std::to_string(unary_.size()) + " unary, " +
                                    std::to_string(binary_.size()) + " binary)");
        }
    }

    std::size_t unary_count() const { return unary_.size(); }
    std::size_t binary_count() const { return binary_.size(); }
    std::size_t cell_bits() const { return unary_.size() + binary_.size(); }
    std::size_t cross_bits() const { return 2 * binary_.size(); }

    int unary_index(const std::string& p) const { return index_of(unary_, p); }
    int binary_index(const std::string& p) const { return index_of(binary_, p); }

    std::uint64_t place(std::uint64_t cx, std::uint64_t cy, std::uint64_t cross) const {
        const std::size_t u = unary_.size();
        const std::size_t b = binary_.size();
        const std::uint64_t umask = low(u);
        return (cx & umask) | ((cy & umask) << u) | ((cx >> u) << (2 * u)) |
               ((cy >> u) << (2 * u + b)) | (b == 0 ? 0 : cross << (2 * u + 2 * b));
    }

    std::uint64_t swap_cross(std::uint64_t cross) const {
        const std::size_t b = binary_.size();
        return ((cross & low(b)) << b) | (cross >> b);
    }

    std::uint64_t diagonal(std::uint64_t cell) const {
        const std::uint64_t refl = cell >> unary_.size();
        return place(cell, cell, refl | (refl << binary_.size()));
    }

    static std::uint64_t low(std::size_t bits) {
        return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    }

private:
    static int index_of(const std::vector<std::string>& v, const std::string& p) {
        auto it = std::find(v.begin(), v.end(), p);
        return it == v.end() ? -1 : static_cast<int>(it - v.begin());
    }

    std::vector<std::string> unary_;
    std::vector<std::string> binary_;
};

class LocalCircuit {
public:
    LocalCircuit(const Formula& matrix, const LocalLayout& layout,
                 const std::map<std::string, bool>& nullary) {
        root_ = compile(matrix, layout, nullary);
    }

    bool eval(std::uint64_t mask) const { return eval(root_, mask); }
    bool is_constant() const { return nodes_[root_].op == Op::constant; }
    bool constant_value() const { return nodes_[root_].value; }

private:
    enum class Op : std::uint8_t { constant, bit, negation, conjunction, disjunction, equivalence };
    struct Node {
        Op op;
        bool value = false;
        std::uint32_t bit = 0;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
    };

    std::uint32_t push(Node n) {
        nodes_.push_back(n);
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }
    std::uint32_t constant(bool v) { return push({Op::constant, v}); }
    bool is_const(std::uint32_t id) const { return nodes_[id].op == Op::constant; }

    std::uint32_t negate(std::uint32_t k) {
        if (is_const(k)) return constant(!nodes_[k].value);
        return push({Op::negation, false, 0, k});
    }

    std::uint32_t junction(Op op, std::uint32_t l, std::uint32_t r) {
        const bool absorbing = op == Op::disjunction;
        for (auto k : {l, r}) {
            if (is_const(k) && nodes_[k].value == absorbing) return constant(absorbing);
        }
        if (is_const(l)) return r;
        if (is_const(r)) return l;
        return push({op, false, 0, l, r});
    }

    std::uint32_t compile(const Formula& f, const LocalLayout& layout,
                          const std::map<std::string, bool>& nullary) {
        switch (f.kind()) {
            case NodeKind::truth: return constant(true);
            case NodeKind::falsity: return constant(false);
            case NodeKind::atom: return atom(f, layout, nullary);
            case NodeKind::negation: return negate(compile(f.child(0), layout, nullary));
            case NodeKind::conjunction:
                return junction(Op::conjunction, compile(f.child(0), layout, nullary),
                                compile(f.child(1), layout, nullary));
            case NodeKind::disjunction:
                return junction(Op::disjunction, compile(f.child(0), layout, nullary),
                                compile(f.child(1), layout, nullary));
            case NodeKind::implication:
                return junction(Op::disjunction, negate(compile(f.child(0), layout, nullary)),
                                compile(f.child(1), layout, nullary));
            case NodeKind::equivalence: {
                auto l = compile(f.child(0), layout, nullary);
                auto r = compile(f.child(1), layout, nullary);
                if (is_const(l) && is_const(r)) return constant(nodes_[l].value == nodes_[r].value);
                if (is_const(l)) return nodes_[l].value ? r : negate(r);
                if (is_const(r)) return nodes_[r].value ? l : negate(l);
                return push({Op::equivalence, false, 0, l, r});
            }
            default:
                throw unsupported_error("matrix is not quantifier-free: " + to_string(f));
        }
    }

    std::uint32_t atom(const Formula& f, const LocalLayout& layout,
                       const std::map<std::string, bool>& nullary) {
        const auto& args = f.args();
        auto which = [&](const Term& t) -> std::size_t {
            if (t.is_var() && t.name == "x") return 0;
            if (t.is_var() && t.name == "y") return 1;
            throw unsupported_error("matrix atom " + to_string(f) + " uses a term other than x, y");
        };
        const std::size_t u = layout.unary_count();
        const std::size_t b = layout.binary_count();
        if (args.empty()) {
            auto it = nullary.find(f.predicate());
            if (it == nullary.end()) {
                throw std::invalid_argument("unknown nullary predicate " + f.predicate());
            }
            return constant(it->second);
        }
        if (args.size() == 1) {
            int i = layout.unary_index(f.predicate());
            if (i < 0) throw std::invalid_argument("unknown unary predicate " + f.predicate());
            return push({Op::bit, false, static_cast<std::uint32_t>(which(args[0]) * u + i)});
        }
        int i = layout.binary_index(f.predicate());
        if (i < 0) throw std::invalid_argument("unknown binary predicate " + f.predicate());
        const std::size_t s = which(args[0]);
        const std::size_t t = which(args[1]);
        std::size_t bit = 0;
        if (s == t) {
            bit = 2 * u + s * b + i;
        } else {
            bit = 2 * u + 2 * b + (s == 0 ? 0 : b) + i;
        }
        return push({Op::bit, false, static_cast<std::uint32_t>(bit)});
    }

    bool eval(std::uint32_t id, std::uint64_t mask) const {
        const Node& n = nodes_[id];
        switch (n.op) {
            case Op::constant: return n.value;
            case Op::bit: return ((mask >> n.bit) & 1U) != 0;
            case Op::negation: return !eval(n.a, mask);
            case Op::conjunction: return eval(n.a, mask) && eval(n.b, mask);
            case Op::disjunction: return eval(n.a, mask) || eval(n.b, mask);
            case Op::equivalence: return eval(n.a, mask) == eval(n.b, mask);
        }
        return false;
    }

    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
};

LocalLayout layout_of(const Vocabulary& vocab) {
    std::vector<std::string> unary;
    std::vector<std::string> binary;
    for (const auto& p : vocab) {
        if (p.arity == 0) {
            throw std::invalid_argument("cell functions need a vocabulary without nullary predicates");
        }
        (p.arity == 1 ? unary : binary).push_back(p.name);
    }
    return {unary, binary};
}

// Weight of a cross assignment: bits [0,B) are R(a,b), [B,2B) are R(b,a).
std::vector<qcomplex> cross_weights(const std::vector<qcomplex>& wb, const std::vector<qcomplex>& nb) {
    const std::size_t b = wb.size();
    std::vector<qcomplex> out(std::size_t{1} << (2 * b));
    for (std::size_t m = 0; m < out.size(); ++m) {
        qcomplex acc(1);
        for (std::size_t i = 0; i < 2 * b; ++i) {
            acc *= ((m >> i) & 1U) ? wb[i % b] : nb[i % b];
        }
        out[m] = acc;
    }
    return out;
}

qcomplex cell_weight_impl(std::uint64_t cell, const std::vector<qcomplex>& wu,
                          const std::vector<qcomplex>& nu, const std::vector<qcomplex>& wb,
                          const std::vector<qcomplex>& nb) {
    qcomplex acc(1);
    const std::size_t u = wu.size();
    for (std::size_t i = 0; i < u; ++i) acc *= ((cell >> i) & 1U) ? wu[i] : nu[i];
    for (std::size_t i = 0; i < wb.size(); ++i) acc *= ((cell >> (u + i)) & 1U) ? wb[i] : nb[i];
    return acc;
}

real to_real(const cpp_int& v) {
    if (v == 0) return 0;
    // Most significant limbs first; exact until the 113-bit mantissa fills.
    const std::size_t bits = boost::multiprecision::msb(v) + 1;
    real acc = 0;
    const real two32 = 4294967296.0;
    for (std::size_t shift = (bits + 31) / 32 * 32; shift > 0; shift -= 32) {
        cpp_int limb = (v >> (shift - 32)) & 0xFFFFFFFFU;
        acc = acc * two32 + real(limb.convert_to<std::uint32_t>());
    }
    return acc;
}

// Lazily filled table base^e for the exponents a composition sum touches.
class PowerCache {
public:
    explicit PowerCache(qcomplex base) : base_(std::move(base)) {}
    const qcomplex& get(std::uint64_t e) {
        if (e >= values_.size()) {
            values_.resize(e + 1);
            have_.resize(e + 1, false);
        }
        if (!have_[e]) {
            values_[e] = ipow(base_, e);
            check_magnitude(values_[e], "lifted power");
            have_[e] = true;
        }
        return values_[e];
    }

private:
    qcomplex base_;
    std::vector<qcomplex> values_;
    std::vector<bool> have_;
};

bool next_colex(std::vector<std::size_t>& parts) {
    std::size_t i = 0;
    while (parts[i] == 0) ++i;
    if (i + 1 == parts.size()) return false;
    const std::size_t t = parts[i];
    parts[i] = 0;
    parts[i + 1] += 1;
    parts[0] = t - 1;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------

Fo2Theory normalize_theory(const std::vector<Formula>& sentences, const Vocabulary& vocab) {
    Normalizer n(vocab);
    for (const auto& s : sentences) n.add_sentence(s);
    return n.take();
}

SkolemizedTheory skolemize(const Fo2Theory& theory, const WeightFunction& w,
                           const WeightFunction& wbar) {
    SkolemizedTheory out{{theory.vocabulary, {}}, w, wbar};
    int counter = 0;
    for (const auto& s : theory.sentences) {
        if (s.prefix == Prefix::forall_exists) {
            std::string name = fresh_name(out.theory.vocabulary, "sk", counter);
            out.theory.vocabulary.add({name, 1});
            out.w.set(name, qcomplex(1));
            out.wbar.set(name, qcomplex(-1));
            out.theory.sentences.push_back(
                {Prefix::forall_xy, Formula::implication(s.matrix, var_atom(name, {"x"}))});
        } else if (s.prefix == Prefix::exists_x) {
            std::string name = fresh_name(out.theory.vocabulary, "sk", counter);
            out.theory.vocabulary.add({name, 0});
            out.w.set(name, qcomplex(1));
            out.wbar.set(name, qcomplex(-1));
            out.theory.sentences.push_back(
                {Prefix::forall_x, Formula::implication(s.matrix, Formula::atom(name, {}))});
        } else {
            out.theory.sentences.push_back(s);
        }
    }
    return out;
}

std::vector<Cell> enumerate_cells(const Vocabulary& vocab, const Formula& matrix) {
    LocalLayout layout = layout_of(vocab);
    LocalCircuit circuit(matrix, layout, {});
    std::vector<Cell> out;
    for (std::uint64_t c = 0; c <= LocalLayout::low(layout.cell_bits()); ++c) {
        if (circuit.eval(layout.diagonal(c))) out.push_back({c});
    }
    return out;
}

qcomplex cell_weight(const Cell& c, const Vocabulary& vocab, const WeightFunction& w,
                     const WeightFunction& wbar) {
    std::vector<qcomplex> wu, nu, wb, nb;
    for (const auto& p : vocab) {
        if (p.arity == 1) {
            wu.push_back(w(p.name));
            nu.push_back(wbar(p.name));
        } else if (p.arity == 2) {
            wb.push_back(w(p.name));
            nb.push_back(wbar(p.name));
        }
    }
    return cell_weight_impl(c.bits, wu, nu, wb, nb);
}

qcomplex pair_weight(const Cell& ci, const Cell& cj, const Vocabulary& vocab,
                     const Formula& matrix, const WeightFunction& w, const WeightFunction& wbar) {
    LocalLayout layout = layout_of(vocab);
    LocalCircuit circuit(matrix, layout, {});
    std::vector<qcomplex> wb, nb;
    for (const auto& p : vocab) {
        if (p.arity == 2) {
            wb.push_back(w(p.name));
            nb.push_back(wbar(p.name));
        }
    }
    auto weights = cross_weights(wb, nb);
    qcomplex sum(0);
    for (std::uint64_t m = 0; m < weights.size(); ++m) {
        if (circuit.eval(layout.place(ci.bits, cj.bits, m)) &&
            circuit.eval(layout.place(cj.bits, ci.bits, layout.swap_cross(m)))) {
            sum += weights[m];
        }
    }
    return sum;
}

std::uint64_t composition_count(std::size_t n, std::size_t parts) {
    if (parts == 0) return n == 0 ? 1 : 0;
    // C(n + parts - 1, parts - 1) with exact intermediate division
    std::uint64_t r = 1;
    const std::size_t k = parts - 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n + i) / i;
    return r;
}

// ---------------------------------------------------------------------------

LiftedCounter::LiftedCounter(const std::vector<Formula>& sentences, const Vocabulary& vocab)
    : LiftedCounter(normalize_theory(sentences, vocab)) {}

LiftedCounter::LiftedCounter(const Fo2Theory& theory) {
    for (const auto& s : theory.sentences) {
        if (!is_quantifier_free(s.matrix) || mentions_constants(s.matrix) ||
            mentions_equality(s.matrix)) {
            throw unsupported_error("malformed theory matrix: " + to_string(s.matrix));
        }
    }
    auto sk = skolemize(theory, {}, {});
    skolemized_ = std::move(sk.theory);
    skolem_w_ = std::move(sk.w);
    skolem_wbar_ = std::move(sk.wbar);
    compile();
}

void LiftedCounter::compile() {
    std::vector<std::string> nullary;
    for (const auto& p : skolemized_.vocabulary) {
        if (p.arity == 0) nullary.push_back(p.name);
        if (p.arity == 1) unary_.push_back(p.name);
        if (p.arity == 2) binary_.push_back(p.name);
    }
    if (nullary.size() > 20) {
        throw unsupported_error("too many nullary predicates (" + std::to_string(nullary.size()) +
                                ")");
    }
    LocalLayout layout(unary_, binary_);
    const std::uint64_t cell_space = LocalLayout::low(layout.cell_bits());
    const std::uint64_t cross_space = LocalLayout::low(layout.cross_bits());

    for (std::uint64_t s = 0; s < (std::uint64_t{1} << nullary.size()); ++s) {
        Branch branch;
        std::map<std::string, bool> assignment;
        for (std::size_t i = 0; i < nullary.size(); ++i) {
            const bool v = ((s >> i) & 1U) != 0;
            assignment[nullary[i]] = v;
            branch.nullary.emplace_back(nullary[i], v);
        }
        bool feasible = true;
        std::vector<LocalCircuit> singles;
        std::vector<LocalCircuit> doubles;
        for (const auto& sentence : skolemized_.sentences) {
            LocalCircuit c(sentence.matrix, layout, assignment);
            if (c.is_constant()) {
                if (!c.constant_value()) feasible = false;
                continue;
            }
            if (sentence.prefix == Prefix::none) {
                throw std::logic_error("nullary sentence did not reduce to a constant");
            }
            (sentence.prefix == Prefix::forall_x ? singles : doubles).push_back(std::move(c));
        }
        if (!feasible) continue;

        for (std::uint64_t c = 0; c <= cell_space; ++c) {
            const std::uint64_t diag = layout.diagonal(c);
            bool ok = std::all_of(singles.begin(), singles.end(),
                                  [&](const LocalCircuit& k) { return k.eval(diag); }) &&
                      std::all_of(doubles.begin(), doubles.end(),
                                  [&](const LocalCircuit& k) { return k.eval(diag); });
            if (ok) branch.cells.push_back(c);
        }
        if (branch.cells.empty()) continue;

        const std::size_t cells = branch.cells.size();
        for (std::size_t i = 0; i < cells; ++i) {
            for (std::size_t j = i; j < cells; ++j) {
                std::vector<std::uint32_t> admissible;
                for (std::uint64_t m = 0; m <= cross_space; ++m) {
                    const std::uint64_t ab = layout.place(branch.cells[i], branch.cells[j], m);
                    const std::uint64_t ba =
                        layout.place(branch.cells[j], branch.cells[i], layout.swap_cross(m));
                    bool ok = std::all_of(doubles.begin(), doubles.end(), [&](const LocalCircuit& k) {
                        return k.eval(ab) && k.eval(ba);
                    });
                    if (ok) admissible.push_back(static_cast<std::uint32_t>(m));
                }
                branch.pairs.push_back(std::move(admissible));
            }
        }
        branches_.push_back(std::move(branch));
    }
}

WfomcValue LiftedCounter::count(const WeightFunction& w, const WeightFunction& wbar,
                                Domain d) const {
    auto weight = [&](const std::string& p, bool positive) {
        const auto& fixed = positive ? skolem_w_.entries() : skolem_wbar_.entries();
        auto it = fixed.find(p);
        if (it != fixed.end()) return it->second;
        return positive ? w(p) : wbar(p);
    };
    std::vector<qcomplex> wu, nu, wb, nb;
    for (const auto& p : unary_) {
        wu.push_back(weight(p, true));
        nu.push_back(weight(p, false));
    }
    for (const auto& p : binary_) {
        wb.push_back(weight(p, true));
        nb.push_back(weight(p, false));
    }
    const auto crossw = cross_weights(wb, nb);

    const std::size_t n = d.size();
    std::vector<std::vector<cpp_int>> binom(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        binom[m].resize(m + 1);
        binom[m][0] = binom[m][m] = 1;
        for (std::size_t k = 1; k < m; ++k) binom[m][k] = binom[m - 1][k - 1] + binom[m - 1][k];
    }

    WfomcValue result;
    for (const auto& branch : branches_) {
        qcomplex scale(1);
        for (const auto& [name, value] : branch.nullary) scale *= weight(name, value);
        if (scale == qcomplex(0)) continue;

        // Cells with zero weight can only appear with multiplicity 0.
        std::vector<std::size_t> keep;
        std::vector<PowerCache> cell_pow;
        for (std::size_t i = 0; i < branch.cells.size(); ++i) {
            qcomplex cw = cell_weight_impl(branch.cells[i], wu, nu, wb, nb);
            if (cw == qcomplex(0)) continue;
            keep.push_back(i);
            cell_pow.emplace_back(cw);
        }
        const std::size_t c = keep.size();
        if (c == 0) continue;

        const std::size_t total = branch.cells.size();
        auto pair_index = [&](std::size_t i, std::size_t j) {
            // upper-triangle row-major offset of (i, j), i <= j
            return i * total - i * (i - 1) / 2 + (j - i);
        };
        std::vector<PowerCache> pair_pow;  // kept (a, b), a <= b, row-major
        for (std::size_t a = 0; a < c; ++a) {
            for (std::size_t b = a; b < c; ++b) {
                qcomplex r(0);
                for (auto m : branch.pairs[pair_index(keep[a], keep[b])]) r += crossw[m];
                pair_pow.emplace_back(r);
            }
        }
        auto pp = [&](std::size_t a, std::size_t b) -> PowerCache& {
            return pair_pow[a * c - a * (a - 1) / 2 + (b - a)];
        };

        qcomplex branch_sum(0);
        std::vector<std::size_t> parts(c, 0);
        parts[0] = n;
        do {
            cpp_int multinomial = 1;
            std::size_t prefix = 0;
            for (std::size_t i = 0; i < c; ++i) {
                prefix += parts[i];
                if (parts[i] != 0 && parts[i] != prefix) multinomial *= binom[prefix][parts[i]];
            }
            qcomplex term(to_real(multinomial));
            for (std::size_t a = 0; a < c; ++a) {
                const std::uint64_t na = parts[a];
                if (na == 0) continue;
                term *= cell_pow[a].get(na);
                if (na > 1) term *= pp(a, a).get(na * (na - 1) / 2);
                for (std::size_t b = a + 1; b < c; ++b) {
                    if (parts[b] != 0) term *= pp(a, b).get(na * parts[b]);
                }
            }
            check_magnitude(term, "lifted composition term");
            result.magnitude += abs(term) * abs(scale);
            branch_sum += term;
            ++result.stats.compositions;
        } while (next_colex(parts));

        result.value += scale * branch_sum;
        result.stats.cells += c;
        ++result.stats.branches;
    }
    check_magnitude(result.value, "lifted result");
    return result;
}

WfomcValue lifted_wfomc(const Fo2Theory& theory, const WeightFunction& w,
                        const WeightFunction& wbar, Domain d) {
    return LiftedCounter(theory).count(w, wbar, d);
}

WfomcValue lifted_wfomc(const std::vector<Formula>& sentences, const Vocabulary& vocab,
                        const WeightFunction& w, const WeightFunction& wbar, Domain d) {
    return LiftedCounter(sentences, vocab).count(w, wbar, d);
}

}  // namespace liftcount
