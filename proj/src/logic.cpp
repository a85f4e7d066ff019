#include "liftcount/logic.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <stdexcept>

#include "liftcount/errors.hpp"

namespace liftcount {

Domain::Domain(std::size_t size) : size_(size) {
    if (size == 0) throw std::invalid_argument("domain size must be at least 1");
}

Vocabulary::Vocabulary(std::initializer_list<Predicate> preds) {
    for (const auto& p : preds) add(p);
}

void Vocabulary::add(Predicate p) {
    if (p.arity < 0 || p.arity > 2) {
        throw std::invalid_argument("predicate " + p.name + " has arity " +
                                    std::to_string(p.arity) + "; only 0..2 are supported");
    }
    if (find(p.name) != nullptr) throw std::invalid_argument("duplicate predicate " + p.name);
    preds_.push_back(std::move(p));
}

const Predicate* Vocabulary::find(std::string_view name) const {
    auto it = std::find_if(preds_.begin(), preds_.end(),
                           [&](const Predicate& p) { return p.name == name; });
    return it == preds_.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------------------
// Formula nodes

struct Formula::Node {
    NodeKind kind;
    std::string name;  // predicate or bound variable
    std::vector<Term> args;
    std::vector<Formula> children;
};

Formula Formula::top() {
    static const Formula t(std::make_shared<const Node>(Node{NodeKind::truth, {}, {}, {}}));
    return t;
}

Formula Formula::bottom() {
    static const Formula f(std::make_shared<const Node>(Node{NodeKind::falsity, {}, {}, {}}));
    return f;
}

Formula Formula::atom(std::string predicate, std::vector<Term> args) {
    return Formula(std::make_shared<const Node>(
        Node{NodeKind::atom, std::move(predicate), std::move(args), {}}));
}

Formula Formula::equality(Term lhs, Term rhs) {
    return Formula(std::make_shared<const Node>(
        Node{NodeKind::equality, {}, {std::move(lhs), std::move(rhs)}, {}}));
}

Formula Formula::negation(Formula f) {
    return Formula(std::make_shared<const Node>(Node{NodeKind::negation, {}, {}, {std::move(f)}}));
}

#define LIFTCOUNT_BINARY(fn, kind_)                                                      \
    Formula Formula::fn(Formula a, Formula b) {                                          \
        return Formula(std::make_shared<const Node>(                                     \
            Node{NodeKind::kind_, {}, {}, {std::move(a), std::move(b)}}));               \
    }
LIFTCOUNT_BINARY(conjunction, conjunction)
LIFTCOUNT_BINARY(disjunction, disjunction)
LIFTCOUNT_BINARY(implication, implication)
LIFTCOUNT_BINARY(equivalence, equivalence)
#undef LIFTCOUNT_BINARY

Formula Formula::forall(std::string var, Formula body) {
    return Formula(std::make_shared<const Node>(
        Node{NodeKind::forall, std::move(var), {}, {std::move(body)}}));
}

Formula Formula::exists(std::string var, Formula body) {
    return Formula(std::make_shared<const Node>(
        Node{NodeKind::exists, std::move(var), {}, {std::move(body)}}));
}

NodeKind Formula::kind() const { return node_->kind; }
const std::string& Formula::predicate() const { return node_->name; }
const std::vector<Term>& Formula::args() const { return node_->args; }
const std::string& Formula::variable() const { return node_->name; }
std::size_t Formula::child_count() const { return node_->children.size(); }
const Formula& Formula::child(std::size_t i) const { return node_->children.at(i); }

bool Formula::is_quantifier() const {
    return kind() == NodeKind::forall || kind() == NodeKind::exists;
}

bool Formula::is_binary() const {
    switch (kind()) {
        case NodeKind::conjunction:
        case NodeKind::disjunction:
        case NodeKind::implication:
        case NodeKind::equivalence:
            return true;
        default:
            return false;
    }
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    return x.kind == y.kind && x.name == y.name && x.args == y.args && x.children == y.children;
}

Formula operator!(const Formula& f) { return Formula::negation(f); }
Formula operator&&(const Formula& a, const Formula& b) { return Formula::conjunction(a, b); }
Formula operator||(const Formula& a, const Formula& b) { return Formula::disjunction(a, b); }

Formula conjoin(const std::vector<Formula>& fs) {
    if (fs.empty()) return Formula::top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = acc && fs[i];
    return acc;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { ident, number, lparen, rparen, comma, bang, amp, bar, arrow, iff, eq, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        std::size_t col = i + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::ident, std::string(s.substr(i, j - i)), col});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::number, std::string(s.substr(i, j - i)), col});
            i = j;
        } else if (s.substr(i, 3) == "<->") {
            out.push_back({Tok::iff, "<->", col});
            i += 3;
        } else if (s.substr(i, 2) == "->") {
            out.push_back({Tok::arrow, "->", col});
            i += 2;
        } else {
            Tok k;
            switch (c) {
                case '(': k = Tok::lparen; break;
                case ')': k = Tok::rparen; break;
                case ',': k = Tok::comma; break;
                case '!': k = Tok::bang; break;
                case '&': k = Tok::amp; break;
                case '|': k = Tok::bar; break;
                case '=': k = Tok::eq; break;
                default:
                    throw parse_error(1, col, std::string("unexpected character '") + c + "'");
            }
            out.push_back({k, std::string(1, c), col});
            ++i;
        }
    }
    out.push_back({Tok::end, "", s.size() + 1});
    return out;
}

bool is_keyword(const std::string& s) {
    return s == "forall" || s == "exists" || s == "true" || s == "false";
}

class Parser {
public:
    Parser(std::string_view text, const Vocabulary& vocab, const ParseOptions& options)
        : toks_(tokenize(text)), vocab_(vocab), options_(options) {}

    Formula parse() {
        Formula f = parse_iff();
        if (peek().kind != Tok::end) fail(peek(), "unexpected '" + peek().text + "'");
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw parse_error(1, t.column, msg);
    }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) {
            fail(peek(), std::string("expected ") + what +
                             (peek().kind == Tok::end ? " at end of input"
                                                      : ", found '" + peek().text + "'"));
        }
        return next();
    }

    void note_variable(const Token& t) {
        if (variables_.insert(t.text).second && variables_.size() > options_.max_variables) {
            fail(t, "formula uses more than " + std::to_string(options_.max_variables) +
                        " distinct variables ('" + t.text + "')");
        }
    }

    Formula parse_iff() {
        Formula lhs = parse_implies();
        while (accept(Tok::iff)) lhs = Formula::equivalence(lhs, parse_implies());
        return lhs;
    }

    Formula parse_implies() {
        Formula lhs = parse_or();
        if (accept(Tok::arrow)) return Formula::implication(lhs, parse_implies());
        return lhs;
    }

    Formula parse_or() {
        Formula lhs = parse_and();
        while (accept(Tok::bar)) lhs = Formula::disjunction(lhs, parse_and());
        return lhs;
    }

    Formula parse_and() {
        Formula lhs = parse_unary();
        while (accept(Tok::amp)) lhs = Formula::conjunction(lhs, parse_unary());
        return lhs;
    }

    Formula parse_unary() {
        if (accept(Tok::bang)) return Formula::negation(parse_unary());
        const Token& t = peek();
        if (t.kind == Tok::ident && (t.text == "forall" || t.text == "exists")) {
            bool universal = t.text == "forall";
            next();
            std::vector<std::string> vars;
            do {
                const Token& v = expect(Tok::ident, "quantified variable");
                if (is_keyword(v.text) || !std::islower(static_cast<unsigned char>(v.text[0]))) {
                    fail(v, "quantified variable must be a lowercase identifier, found '" +
                                v.text + "'");
                }
                note_variable(v);
                vars.push_back(v.text);
            } while (accept(Tok::comma));
            Formula body = parse_iff();
            for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
                body = universal ? Formula::forall(*it, body) : Formula::exists(*it, body);
            }
            return body;
        }
        return parse_primary();
    }

    Formula parse_primary() {
        const Token& t = peek();
        if (accept(Tok::lparen)) {
            Formula f = parse_iff();
            expect(Tok::rparen, "')'");
            return f;
        }
        if (t.kind == Tok::ident && t.text == "true") {
            next();
            return Formula::top();
        }
        if (t.kind == Tok::ident && t.text == "false") {
            next();
            return Formula::bottom();
        }
        if (t.kind == Tok::ident && peek(1).kind == Tok::lparen) return parse_atom();
        if (t.kind == Tok::ident || t.kind == Tok::number) {
            Term lhs = parse_term();
            expect(Tok::eq, "'(' or '='");
            Term rhs = parse_term();
            return Formula::equality(std::move(lhs), std::move(rhs));
        }
        if (t.kind == Tok::end) fail(t, "unexpected end of formula");
        fail(t, "unexpected '" + t.text + "'");
    }

    Formula parse_atom() {
        const Token name = next();
        next();  // '('
        std::vector<Term> args;
        if (peek().kind != Tok::rparen) {
            do {
                args.push_back(parse_term());
            } while (accept(Tok::comma));
        }
        expect(Tok::rparen, "')'");
        const Predicate* p = vocab_.find(name.text);
        if (p == nullptr) fail(name, "undeclared predicate '" + name.text + "'");
        if (static_cast<std::size_t>(p->arity) != args.size()) {
            fail(name, "predicate '" + name.text + "' has arity " + std::to_string(p->arity) +
                           " but is applied to " + std::to_string(args.size()) + " argument(s)");
        }
        return Formula::atom(name.text, std::move(args));
    }

    Term parse_term() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            next();
            return Term::elem(std::stoul(t.text));
        }
        if (t.kind != Tok::ident || is_keyword(t.text)) fail(t, "expected a term");
        next();
        if (std::isupper(static_cast<unsigned char>(t.text[0]))) return Term::constant(t.text);
        if (t.text[0] == '_') fail(t, "identifiers may not start with '_'");
        note_variable(t);
        return Term::var(t.text);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Vocabulary& vocab_;
    ParseOptions options_;
    std::set<std::string> variables_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Vocabulary& vocab, const ParseOptions& options) {
    return Parser(text, vocab, options).parse();
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Term& t) {
    switch (t.kind) {
        case Term::Kind::element:
            return std::to_string(t.element);
        default:
            return t.name;
    }
}

namespace {

const char* binary_symbol(NodeKind k) {
    switch (k) {
        case NodeKind::conjunction: return " & ";
        case NodeKind::disjunction: return " | ";
        case NodeKind::implication: return " -> ";
        case NodeKind::equivalence: return " <-> ";
        default: return "?";
    }
}

void print(const Formula& f, std::string& out, bool top) {
    switch (f.kind()) {
        case NodeKind::truth: out += "true"; return;
        case NodeKind::falsity: out += "false"; return;
        case NodeKind::atom: {
            out += f.predicate();
            out += '(';
            for (std::size_t i = 0; i < f.args().size(); ++i) {
                if (i != 0) out += ',';
                out += to_string(f.args()[i]);
            }
            out += ')';
            return;
        }
        case NodeKind::equality:
            if (!top) out += '(';
            out += to_string(f.args()[0]) + " = " + to_string(f.args()[1]);
            if (!top) out += ')';
            return;
        case NodeKind::negation:
            out += '!';
            print(f.child(0), out, false);
            return;
        case NodeKind::forall:
        case NodeKind::exists:
            if (!top) out += '(';
            out += f.kind() == NodeKind::forall ? "forall " : "exists ";
            out += f.variable();
            out += ' ';
            print(f.child(0), out, true);
            if (!top) out += ')';
            return;
        default:
            if (!top) out += '(';
            print(f.child(0), out, false);
            out += binary_symbol(f.kind());
            print(f.child(1), out, false);
            if (!top) out += ')';
            return;
    }
}

}  // namespace

std::string to_string(const Formula& f) {
    std::string out;
    print(f, out, true);
    return out;
}

// ---------------------------------------------------------------------------
// Structural queries

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (f.kind()) {
        case NodeKind::atom:
        case NodeKind::equality:
            for (const auto& t : f.args()) {
                if (t.is_var() && !bound.contains(t.name)) out.insert(t.name);
            }
            return;
        case NodeKind::forall:
        case NodeKind::exists: {
            bool fresh = bound.insert(f.variable()).second;
            collect_free(f.child(0), bound, out);
            if (fresh) bound.erase(f.variable());
            return;
        }
        default:
            for (std::size_t i = 0; i < f.child_count(); ++i) collect_free(f.child(i), bound, out);
    }
}

template <class Pred>
bool any_node(const Formula& f, Pred pred) {
    if (pred(f)) return true;
    for (std::size_t i = 0; i < f.child_count(); ++i) {
        if (any_node(f.child(i), pred)) return true;
    }
    return false;
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> bound;
    std::set<std::string> out;
    collect_free(f, bound, out);
    return out;
}

std::set<std::string> all_variables(const Formula& f) {
    std::set<std::string> out;
    any_node(f, [&](const Formula& g) {
        if (g.is_quantifier()) out.insert(g.variable());
        if (g.kind() == NodeKind::atom || g.kind() == NodeKind::equality) {
            for (const auto& t : g.args()) {
                if (t.is_var()) out.insert(t.name);
            }
        }
        return false;
    });
    return out;
}

bool is_quantifier_free(const Formula& f) {
    return !any_node(f, [](const Formula& g) { return g.is_quantifier(); });
}

bool mentions_constants(const Formula& f) {
    return any_node(f, [](const Formula& g) {
        return std::any_of(g.args().begin(), g.args().end(), [](const Term& t) {
            return t.kind != Term::Kind::variable;
        });
    });
}

bool mentions_equality(const Formula& f) {
    return any_node(f, [](const Formula& g) { return g.kind() == NodeKind::equality; });
}

std::set<std::string> predicates_of(const Formula& f) {
    std::set<std::string> out;
    any_node(f, [&](const Formula& g) {
        if (g.kind() == NodeKind::atom) out.insert(g.predicate());
        return false;
    });
    return out;
}

namespace {

Formula rebuild(const Formula& f, std::vector<Formula> children) {
    switch (f.kind()) {
        case NodeKind::negation: return Formula::negation(std::move(children[0]));
        case NodeKind::conjunction: return Formula::conjunction(children[0], children[1]);
        case NodeKind::disjunction: return Formula::disjunction(children[0], children[1]);
        case NodeKind::implication: return Formula::implication(children[0], children[1]);
        case NodeKind::equivalence: return Formula::equivalence(children[0], children[1]);
        case NodeKind::forall: return Formula::forall(f.variable(), children[0]);
        case NodeKind::exists: return Formula::exists(f.variable(), children[0]);
        default: return f;
    }
}

Formula substitute_impl(const Formula& f, const std::map<std::string, Term>& binding) {
    switch (f.kind()) {
        case NodeKind::truth:
        case NodeKind::falsity:
            return f;
        case NodeKind::atom:
        case NodeKind::equality: {
            std::vector<Term> args = f.args();
            for (auto& t : args) {
                if (!t.is_var()) continue;
                auto it = binding.find(t.name);
                if (it != binding.end()) t = it->second;
            }
            return f.kind() == NodeKind::atom ? Formula::atom(f.predicate(), std::move(args))
                                              : Formula::equality(args[0], args[1]);
        }
        case NodeKind::forall:
        case NodeKind::exists: {
            if (!binding.contains(f.variable())) {
                return rebuild(f, {substitute_impl(f.child(0), binding)});
            }
            auto inner = binding;
            inner.erase(f.variable());
            return rebuild(f, {substitute_impl(f.child(0), inner)});
        }
        default: {
            std::vector<Formula> kids;
            for (std::size_t i = 0; i < f.child_count(); ++i) {
                kids.push_back(substitute_impl(f.child(i), binding));
            }
            return rebuild(f, std::move(kids));
        }
    }
}

}  // namespace

Formula substitute(const Formula& f, const std::map<std::string, Term>& binding) {
    return substitute_impl(f, binding);
}

Formula rename_variables(const Formula& f, const std::map<std::string, std::string>& renaming) {
    auto rename = [&](const std::string& v) {
        auto it = renaming.find(v);
        return it == renaming.end() ? v : it->second;
    };
    switch (f.kind()) {
        case NodeKind::atom:
        case NodeKind::equality: {
            std::vector<Term> args = f.args();
            for (auto& t : args) {
                if (t.is_var()) t.name = rename(t.name);
            }
            return f.kind() == NodeKind::atom ? Formula::atom(f.predicate(), std::move(args))
                                              : Formula::equality(args[0], args[1]);
        }
        case NodeKind::forall:
            return Formula::forall(rename(f.variable()), rename_variables(f.child(0), renaming));
        case NodeKind::exists:
            return Formula::exists(rename(f.variable()), rename_variables(f.child(0), renaming));
        default: {
            std::vector<Formula> kids;
            for (std::size_t i = 0; i < f.child_count(); ++i) {
                kids.push_back(rename_variables(f.child(i), renaming));
            }
            return rebuild(f, std::move(kids));
        }
    }
}

Formula universal_closure(const Formula& f) {
    auto vars = free_variables(f);
    Formula out = f;
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) out = Formula::forall(*it, out);
    return out;
}

std::vector<Formula> groundings(const Formula& f, Domain d) {
    auto vars_set = free_variables(f);
    std::vector<std::string> vars(vars_set.begin(), vars_set.end());
    std::vector<Formula> out;
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
        std::map<std::string, Term> binding;
        for (std::size_t i = 0; i < vars.size(); ++i) binding[vars[i]] = Term::elem(idx[i]);
        out.push_back(vars.empty() ? f : substitute(f, binding));
        // odometer, last variable fastest
        std::size_t pos = vars.size();
        while (pos > 0) {
            --pos;
            if (++idx[pos] < d.size()) break;
            idx[pos] = 0;
            if (pos == 0) return out;
        }
        if (vars.empty()) return out;
    }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::size_t resolve(const Term& t, const std::map<std::string, std::size_t>& env, Domain d) {
    switch (t.kind) {
        case Term::Kind::element:
            if (t.element >= d.size()) {
                throw std::invalid_argument("element " + std::to_string(t.element) +
                                            " outside domain of size " + std::to_string(d.size()));
            }
            return t.element;
        case Term::Kind::constant:
            throw std::invalid_argument("constant '" + t.name +
                                        "' has no interpretation; use element indices");
        case Term::Kind::variable: {
            auto it = env.find(t.name);
            if (it == env.end()) throw std::invalid_argument("free variable '" + t.name + "'");
            return it->second;
        }
    }
    return 0;
}

bool eval(const Formula& f, const PossibleWorld& w, Domain d,
          std::map<std::string, std::size_t>& env) {
    switch (f.kind()) {
        case NodeKind::truth: return true;
        case NodeKind::falsity: return false;
        case NodeKind::atom: {
            GroundAtom a{f.predicate(), {}};
            for (const auto& t : f.args()) a.args.push_back(resolve(t, env, d));
            return w.contains(a);
        }
        case NodeKind::equality:
            return resolve(f.args()[0], env, d) == resolve(f.args()[1], env, d);
        case NodeKind::negation: return !eval(f.child(0), w, d, env);
        case NodeKind::conjunction: return eval(f.child(0), w, d, env) && eval(f.child(1), w, d, env);
        case NodeKind::disjunction: return eval(f.child(0), w, d, env) || eval(f.child(1), w, d, env);
        case NodeKind::implication: return !eval(f.child(0), w, d, env) || eval(f.child(1), w, d, env);
        case NodeKind::equivalence: return eval(f.child(0), w, d, env) == eval(f.child(1), w, d, env);
        case NodeKind::forall:
        case NodeKind::exists: {
            const bool universal = f.kind() == NodeKind::forall;
            auto saved = env.find(f.variable()) == env.end()
                             ? std::optional<std::size_t>{}
                             : std::optional<std::size_t>{env[f.variable()]};
            bool result = universal;
            for (std::size_t e = 0; e < d.size(); ++e) {
                env[f.variable()] = e;
                if (eval(f.child(0), w, d, env) != universal) {
                    result = !universal;
                    break;
                }
            }
            if (saved) {
                env[f.variable()] = *saved;
            } else {
                env.erase(f.variable());
            }
            return result;
        }
    }
    return false;
}

}  // namespace

bool evaluate(const Formula& f, const PossibleWorld& w, Domain d) {
    std::map<std::string, std::size_t> env;
    return eval(f, w, d, env);
}

std::size_t count_true_groundings(const Formula& f, const PossibleWorld& w, Domain d) {
    std::size_t n = 0;
    for (const auto& g : groundings(f, d)) n += evaluate(g, w, d) ? 1 : 0;
    return n;
}

}  // namespace liftcount
