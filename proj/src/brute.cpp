#include "liftcount/brute.hpp"

#include <bit>
#include <optional>
#include <stdexcept>

#include "liftcount/errors.hpp"
#include "liftcount/parallel.hpp"

namespace liftcount {

qcomplex WeightFunction::operator()(std::string_view predicate) const {
    auto it = weights_.find(predicate);
    return it == weights_.end() ? qcomplex(1) : it->second;
}

namespace {

std::size_t ipow_size(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

AtomTable::AtomTable(const Vocabulary& vocab, Domain d) : domain_(d) {
    const std::size_t n = d.size();
    for (const auto& p : vocab) {
        const std::size_t count = ipow_size(n, p.arity);
        blocks_.push_back({p, atoms_.size(), count});
        for (std::size_t k = 0; k < count; ++k) {
            GroundAtom a{p.name, {}};
            if (p.arity == 1) a.args = {k};
            if (p.arity == 2) a.args = {k / n, k % n};
            atoms_.push_back(std::move(a));
        }
    }
}

std::size_t AtomTable::index(std::string_view predicate, std::span<const std::size_t> args) const {
    for (const auto& b : blocks_) {
        if (b.predicate.name != predicate) continue;
        if (args.size() != static_cast<std::size_t>(b.predicate.arity)) {
            throw std::invalid_argument("arity mismatch for " + std::string(predicate));
        }
        std::size_t k = 0;
        for (auto a : args) {
            if (a >= domain_.size()) throw std::invalid_argument("element outside domain");
            k = k * domain_.size() + a;
        }
        return b.offset + k;
    }
    throw std::invalid_argument("unknown predicate " + std::string(predicate));
}

// ---------------------------------------------------------------------------

GroundCircuit::GroundCircuit(const Formula& sentence, const AtomTable& atoms) {
    std::map<std::string, std::size_t> env;
    root_ = compile(sentence, env, atoms);
}

std::uint32_t GroundCircuit::add(Node n, const std::vector<std::uint32_t>& kids) {
    n.first = static_cast<std::uint32_t>(kids_.size());
    n.count = static_cast<std::uint32_t>(kids.size());
    kids_.insert(kids_.end(), kids.begin(), kids.end());
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t GroundCircuit::compile(const Formula& f, std::map<std::string, std::size_t>& env,
                                     const AtomTable& atoms) {
    auto resolve = [&](const Term& t) -> std::size_t {
        switch (t.kind) {
            case Term::Kind::element: return t.element;
            case Term::Kind::constant:
                throw std::invalid_argument("constant '" + t.name + "' has no interpretation");
            case Term::Kind::variable: {
                auto it = env.find(t.name);
                if (it == env.end()) {
                    throw std::invalid_argument("free variable '" + t.name + "' in sentence");
                }
                return it->second;
            }
        }
        return 0;
    };
    auto constant = [&](bool v) { return add({Op::constant, v}, {}); };
    auto is_const = [&](std::uint32_t id) { return nodes_[id].op == Op::constant; };

    // n-ary and/or with constant folding
    auto junction = [&](Op op, std::vector<std::uint32_t> kids) -> std::uint32_t {
        const bool absorbing = op == Op::disjunction;
        std::vector<std::uint32_t> keep;
        for (auto k : kids) {
            if (is_const(k)) {
                if (nodes_[k].value == absorbing) return constant(absorbing);
                continue;
            }
            keep.push_back(k);
        }
        if (keep.empty()) return constant(!absorbing);
        if (keep.size() == 1) return keep.front();
        return add({op}, keep);
    };
    auto negate = [&](std::uint32_t k) -> std::uint32_t {
        if (is_const(k)) return constant(!nodes_[k].value);
        return add({Op::negation}, {k});
    };

    switch (f.kind()) {
        case NodeKind::truth: return constant(true);
        case NodeKind::falsity: return constant(false);
        case NodeKind::atom: {
            std::vector<std::size_t> args;
            for (const auto& t : f.args()) args.push_back(resolve(t));
            Node n{Op::atom};
            n.atom = static_cast<std::uint32_t>(atoms.index(f.predicate(), args));
            return add(n, {});
        }
        case NodeKind::equality:
            return constant(resolve(f.args()[0]) == resolve(f.args()[1]));
        case NodeKind::negation: return negate(compile(f.child(0), env, atoms));
        case NodeKind::conjunction:
            return junction(Op::conjunction,
                            {compile(f.child(0), env, atoms), compile(f.child(1), env, atoms)});
        case NodeKind::disjunction:
            return junction(Op::disjunction,
                            {compile(f.child(0), env, atoms), compile(f.child(1), env, atoms)});
        case NodeKind::implication: {
            auto a = negate(compile(f.child(0), env, atoms));
            return junction(Op::disjunction, {a, compile(f.child(1), env, atoms)});
        }
        case NodeKind::equivalence: {
            auto a = compile(f.child(0), env, atoms);
            auto b = compile(f.child(1), env, atoms);
            if (is_const(a) && is_const(b)) return constant(nodes_[a].value == nodes_[b].value);
            if (is_const(a)) return nodes_[a].value ? b : negate(b);
            if (is_const(b)) return nodes_[b].value ? a : negate(a);
            return add({Op::equivalence}, {a, b});
        }
        case NodeKind::forall:
        case NodeKind::exists: {
            const std::string& v = f.variable();
            auto saved = env.find(v);
            std::optional<std::size_t> old;
            if (saved != env.end()) old = saved->second;
            std::vector<std::uint32_t> kids;
            for (std::size_t e = 0; e < atoms.domain().size(); ++e) {
                env[v] = e;
                kids.push_back(compile(f.child(0), env, atoms));
            }
            if (old) {
                env[v] = *old;
            } else {
                env.erase(v);
            }
            return junction(f.kind() == NodeKind::forall ? Op::conjunction : Op::disjunction,
                            std::move(kids));
        }
    }
    return constant(false);
}

bool GroundCircuit::eval(std::uint32_t id, std::uint64_t world) const {
    const Node& n = nodes_[id];
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::atom: return ((world >> n.atom) & 1U) != 0;
        case Op::negation: return !eval(kids_[n.first], world);
        case Op::conjunction:
            for (std::uint32_t i = 0; i < n.count; ++i) {
                if (!eval(kids_[n.first + i], world)) return false;
            }
            return true;
        case Op::disjunction:
            for (std::uint32_t i = 0; i < n.count; ++i) {
                if (eval(kids_[n.first + i], world)) return true;
            }
            return false;
        case Op::equivalence:
            return eval(kids_[n.first], world) == eval(kids_[n.first + 1], world);
    }
    return false;
}

namespace {

// kLowBits[a] has bit j set iff bit a of j is set, for the six atoms that
// vary inside a 64-world chunk.
constexpr std::uint64_t kLowBits[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

}  // namespace

std::uint64_t GroundCircuit::eval64(std::uint32_t id, std::uint64_t base) const {
    const Node& n = nodes_[id];
    switch (n.op) {
        case Op::constant: return n.value ? ~std::uint64_t{0} : 0;
        case Op::atom:
            if (n.atom < 6) return kLowBits[n.atom];
            return ((base >> n.atom) & 1U) ? ~std::uint64_t{0} : 0;
        case Op::negation: return ~eval64(kids_[n.first], base);
        case Op::conjunction: {
            std::uint64_t acc = ~std::uint64_t{0};
            for (std::uint32_t i = 0; i < n.count && acc != 0; ++i) acc &= eval64(kids_[n.first + i], base);
            return acc;
        }
        case Op::disjunction: {
            std::uint64_t acc = 0;
            for (std::uint32_t i = 0; i < n.count && ~acc != 0; ++i) acc |= eval64(kids_[n.first + i], base);
            return acc;
        }
        case Op::equivalence:
            return ~(eval64(kids_[n.first], base) ^ eval64(kids_[n.first + 1], base));
    }
    return 0;
}

// ---------------------------------------------------------------------------

WorldSpace::WorldSpace(const Vocabulary& vocab, Domain d, std::size_t cap) : atoms_(vocab, d) {
    if (cap > 62) cap = 62;
    if (atoms_.size() > cap) throw brute_cap_error(atoms_.size(), cap);
}

PossibleWorld WorldSpace::world(std::uint64_t mask) const {
    PossibleWorld w;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if ((mask >> i) & 1U) w.insert(atoms_.atom(i));
    }
    return w;
}

std::vector<PossibleWorld> enumerate_worlds(const Vocabulary& vocab, Domain d, std::size_t cap) {
    WorldSpace space(vocab, d, cap);
    std::vector<PossibleWorld> out;
    out.reserve(space.count());
    for (std::uint64_t m = 0; m < space.count(); ++m) out.push_back(space.world(m));
    return out;
}

std::complex<double> brute_wfomc(const std::vector<Formula>& gamma, const Vocabulary& vocab,
                                 const WeightFunction& w, const WeightFunction& wbar, Domain d,
                                 std::size_t cap) {
    WorldSpace space(vocab, d, cap);
    const AtomTable& atoms = space.atoms();

    std::vector<GroundCircuit> circuits;
    circuits.reserve(gamma.size());
    for (const auto& g : gamma) circuits.emplace_back(g, atoms);

    // A world's weight depends only on how many atoms of each predicate are
    // true, so satisfying worlds are tallied exactly per popcount vector and
    // the weights are applied once per bin, in quad precision.
    const auto& blocks = atoms.blocks();
    std::vector<std::uint64_t> masks, radix;
    std::size_t bins = 1;
    for (const auto& b : blocks) {
        masks.push_back(b.count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << b.count) - 1);
        radix.push_back(bins);
        bins *= b.count + 1;
    }
    auto bin_of = [&](std::uint64_t m) {
        std::size_t bin = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            bin += radix[i] * static_cast<std::size_t>(std::popcount((m >> blocks[i].offset) & masks[i]));
        }
        return bin;
    };

    // 64 worlds per circuit pass; spaces smaller than that use the low bits
    const std::uint64_t total = space.count();
    const std::uint64_t chunks = (total + 63) / 64;
    const std::uint64_t live = total >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << total) - 1;
    std::vector<std::vector<std::uint64_t>> partial(block_count(chunks));
    parallel_blocks(chunks, [&](std::size_t block, std::uint64_t begin, std::uint64_t end) {
        std::vector<std::uint64_t> tally(bins, 0);
        for (std::uint64_t c = begin; c < end; ++c) {
            const std::uint64_t base = c * 64;
            std::uint64_t sat = live;
            for (const auto& circuit : circuits) {
                if (sat == 0) break;
                sat &= circuit.evaluate64(base);
            }
            while (sat != 0) {
                const int j = std::countr_zero(sat);
                sat &= sat - 1;
                ++tally[bin_of(base + static_cast<std::uint64_t>(j))];
            }
        }
        partial[block] = std::move(tally);
    });
    std::vector<std::uint64_t> tally(bins, 0);
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < p.size(); ++i) tally[i] += p[i];
    }

    qcomplex result;
    for (std::size_t bin = 0; bin < bins; ++bin) {
        if (tally[bin] == 0) continue;
        qcomplex term(real(tally[bin]));
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const std::uint64_t k = bin / radix[i] % (blocks[i].count + 1);
            const auto& name = blocks[i].predicate.name;
            term *= ipow(w(name), k) * ipow(wbar(name), blocks[i].count - k);
        }
        result += term;
    }
    return result.to_std();
}

}  // namespace liftcount
