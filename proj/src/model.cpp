#include "liftcount/model.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "liftcount/errors.hpp"

namespace liftcount {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

/// Cursor over one line; columns are 1-based.
class LineReader {
public:
    LineReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_ + 1, msg); }
    [[noreturn]] void fail_at(std::size_t column, const std::string& msg) const {
        throw parse_error(line_, column, msg);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    std::size_t column() {
        skip_space();
        return pos_ + 1;
    }

    std::string identifier(const char* what) {
        skip_space();
        if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(std::string("expected ") + what);
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t integer(const char* what) {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail(std::string("expected ") + what);
        errno = 0;
        const std::string digits(text_.substr(start, pos_ - start));
        unsigned long long v = std::strtoull(digits.c_str(), nullptr, 10);
        if (errno == ERANGE) fail_at(start + 1, "integer out of range");
        return static_cast<std::size_t>(v);
    }

    double number(const char* what) {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != ':') {
            ++pos_;
        }
        const std::string tok(text_.substr(start, pos_ - start));
        char* end = nullptr;
        errno = 0;
        double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) {
            fail_at(start + 1, std::string("expected ") + what);
        }
        return v;
    }

    void expect(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    void expect_end() {
        if (!at_end()) fail("unexpected trailing text");
    }

    /// Remainder of the line and its starting column.
    std::pair<std::string_view, std::size_t> rest() {
        skip_space();
        auto r = std::make_pair(text_.substr(pos_), pos_ + 1);
        pos_ = text_.size();
        return r;
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct PendingFormula {
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

}  // namespace

Model parse_model(std::string_view text) {
    Vocabulary vocab;
    std::optional<Domain> domain;
    std::vector<std::pair<Formula, double>> weighted;
    CountSpec counts;
    std::vector<CardinalityPredicate> cards;
    std::vector<FunctionConstraint> functions;
    std::vector<Query> queries;

    std::size_t formula_col = 0;
    auto formula = [&](LineReader& r, std::size_t line) {
        r.expect(":");
        auto [body, column] = r.rest();
        formula_col = column;
        if (body.empty()) r.fail_at(column, "expected formula");
        try {
            return parse_formula(body, vocab);
        } catch (const parse_error& e) {
            throw parse_error(line, column + e.column() - 1, e.message());
        }
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        LineReader r(line, line_no);
        if (r.at_end()) continue;
        const std::size_t kw_col = r.column();
        const std::string kw = r.identifier("directive");

        if (kw == "domain") {
            if (domain) r.fail_at(kw_col, "duplicate domain directive");
            const std::size_t col = r.column();
            std::size_t n = r.integer("domain size");
            if (n == 0) r.fail_at(col, "domain size must be positive");
            domain = Domain(n);
            r.expect_end();
        } else if (kw == "predicate") {
            const std::size_t col = r.column();
            std::string name = r.identifier("predicate name");
            r.expect("/");
            const std::size_t arity_col = r.column();
            std::size_t arity = r.integer("arity");
            r.expect_end();
            if (arity < 1 || arity > 2) {
                r.fail_at(arity_col, "arity of '" + name + "' must be 1 or 2");
            }
            if (vocab.contains(name)) r.fail_at(col, "predicate '" + name + "' declared twice");
            if (!std::islower(static_cast<unsigned char>(name[0]))) {
                r.fail_at(col, "predicate names start with a lowercase letter");
            }
            vocab.add({name, static_cast<int>(arity)});
        } else if (kw == "weight" || kw == "odds") {
            const std::size_t col = r.column();
            double w = r.number(kw == "weight" ? "weight" : "odds");
            if (kw == "odds") {
                if (w <= 0) r.fail_at(col, "odds must be positive");
                w = std::log(w);
            }
            weighted.emplace_back(formula(r, line_no), w);
        } else if (kw == "hard") {
            weighted.emplace_back(formula(r, line_no), kHardWeight);
        } else if (kw == "count") {
            const std::size_t col = r.column();
            std::string name = r.identifier("count name");
            if (counts.find(name) != counts.size()) r.fail_at(col, "count '" + name + "' declared twice");
            counts.add(name, formula(r, line_no));
        } else if (kw == "cardinality") {
            const std::size_t col = r.column();
            std::string name = r.identifier("count name");
            const std::size_t dim = counts.find(name);
            if (dim == counts.size()) r.fail_at(col, "undeclared count '" + name + "'");
            auto [rest, rest_col] = r.rest();
            LineReader tail(rest, line_no);
            try {
                if (rest.starts_with("==")) {
                    tail.expect("==");
                    std::size_t c = tail.integer("count value");
                    tail.expect_end();
                    cards.push_back(CardinalityPredicate::equals(dim, c));
                } else if (rest.starts_with("in") && (rest.size() == 2 || !is_ident_char(rest[2]))) {
                    tail.expect("in");
                    std::size_t lo = tail.integer("lower bound");
                    tail.expect("..");
                    std::size_t hi = tail.integer("upper bound");
                    tail.expect_end();
                    if (lo > hi) tail.fail_at(1, "empty range");
                    cards.push_back(CardinalityPredicate::between(dim, lo, hi));
                } else {
                    tail.fail_at(1, "expected '==' or 'in'");
                }
            } catch (const parse_error& e) {
                r.fail_at(rest_col + e.column() - 1, e.message());
            }
        } else if (kw == "function") {
            const std::size_t col = r.column();
            std::string name = r.identifier("predicate name");
            r.expect_end();
            const Predicate* p = vocab.find(name);
            if (p == nullptr) r.fail_at(col, "undeclared predicate '" + name + "'");
            if (p->arity != 2) r.fail_at(col, "function constraint needs a binary predicate");
            for (const auto& f : functions) {
                if (f.relation == name) r.fail_at(col, "duplicate function constraint");
            }
            functions.push_back({name});
        } else if (kw == "query") {
            const std::size_t col = r.column();
            std::string name = r.identifier("query name");
            for (const auto& q : queries) {
                if (q.name == name) r.fail_at(col, "query '" + name + "' declared twice");
            }
            Formula s = formula(r, line_no);
            if (!free_variables(s).empty()) r.fail_at(formula_col, "query must be a sentence");
            queries.push_back({name, s});
        } else {
            r.fail_at(kw_col, "unknown directive '" + kw + "'");
        }
    }

    Model m{domain, Mln(vocab), counts, CardinalityPredicate::conjunction(std::move(cards)),
            std::move(functions), std::move(queries)};
    for (auto& [f, w] : weighted) m.mln.add(f, w);
    return m;
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

Problem lifted_problem(const Model& m) {
    if (!m.domain) throw std::invalid_argument("model has no domain directive");
    Problem p{*m.domain, m.mln, {m.counts, m.cardinality}};
    FunctionRewrite rw = rewrite_function_constraints(m.functions, *m.domain);
    for (const auto& h : rw.hard) p.mln.add_hard(h);
    p.constraint = combine(p.constraint, rw.constraint);
    return p;
}

}  // namespace liftcount
