// liftcount: exact inference for two-variable MLNs from the command line.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "liftcount/constraints.hpp"
#include "liftcount/errors.hpp"
#include "liftcount/model.hpp"
#include "liftcount/parallel.hpp"
#include "liftcount/reference.hpp"

using namespace liftcount;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, numeric = 1, parse = 2, infeasible = 3, brute_cap = 4 };

struct Options {
    std::string model;
    std::string out;
    std::string format = "csv";
    std::string query;
    std::size_t n = 10;
    std::size_t threads = 0;
    std::size_t cap = kDefaultBruteCap;
};

/// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

double as_double(const real& x) { return std::stod(format_number(x)); }

std::vector<Query> selected_queries(const Model& m, const std::string& text) {
    if (text.empty()) return m.queries;
    for (const auto& q : m.queries) {
        if (q.name == text) return {q};
    }
    Formula s = parse_formula(text, m.vocabulary());
    if (!free_variables(s).empty()) throw std::invalid_argument("query must be a sentence");
    return {{"query", s}};
}

real query_probability(const Problem& p, const Formula& s) {
    if (p.constraint.psi.empty()) return marginal(p.mln, s, p.domain);
    return constrained_marginal(p.mln, p.constraint, s, p.domain);
}

int cmd_partition(const Options& o) {
    Problem p = lifted_problem(load_model(o.model));
    const real z = p.constraint.psi.empty() ? partition_function(p.mln, p.domain).value
                                            : constrained_partition(p.mln, p.constraint, p.domain);
    std::cout << format_number(z) << '\n';
    return ok;
}

int cmd_marginal(const Options& o) {
    Model m = load_model(o.model);
    Problem p = lifted_problem(m);
    auto queries = selected_queries(m, o.query);
    if (queries.empty()) throw std::invalid_argument("no query given and none in the model");
    for (const auto& q : queries) {
        std::cout << q.name << ' ' << format_number(query_probability(p, q.sentence)) << '\n';
    }
    return ok;
}

int cmd_countdist(const Options& o) {
    Model m = load_model(o.model);
    Problem p = lifted_problem(m);
    if (p.constraint.psi.empty()) throw std::invalid_argument("model declares no count formulas");
    CountDistribution q = m.constrained() ? constrained_distribution(p.mln, p.constraint, p.domain)
                                          : count_distribution(p.mln, p.constraint.psi, p.domain);
    Output out(o.out);
    if (o.format == "csv") {
        write_distribution_csv(out.stream(), q);
        return ok;
    }
    json doc;
    doc["partition"] = {{"re", as_double(q.partition)}, {"im", 0.0}};
    json marginals = json::object();
    for (const auto& qu : m.queries) {
        marginals[qu.name] = as_double(query_probability(p, qu.sentence));
    }
    doc["marginals"] = marginals;
    json rows = json::array();
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        rows.push_back({{"index", q.grid.index(i)}, {"p", as_double(q.p[i])}});
    }
    doc["countdist"] = rows;
    out.stream() << doc.dump(2) << '\n';
    return ok;
}

int cmd_spectrum(const Options& o) {
    Problem p = lifted_problem(load_model(o.model));
    if (p.constraint.psi.empty()) throw std::invalid_argument("model declares no count formulas");
    Output out(o.out);
    write_spectrum_csv(out.stream(), full_spectrum(p.mln, p.constraint.psi, p.domain));
    return ok;
}

int cmd_fixedpoints(const Options& o) {
    Output out(o.out);
    out.stream() << "k,probability_engine,probability_analytic\n";
    for (const auto& r : fixed_point_distribution(o.n)) {
        out.stream() << r.k << ',' << format_number(r.engine) << ',' << format_number(r.analytic)
                     << '\n';
    }
    return ok;
}

/// Lifted results against direct enumeration of the model as written
/// (function constraints evaluated literally, with equality).
int cmd_check(const Options& o) {
    Model m = load_model(o.model);
    Problem p = lifted_problem(m);
    std::vector<Formula> literal;
    for (const auto& f : m.functions) literal.push_back(functionality_sentence(f.relation));
    ReferenceModel ref(m.mln, p.domain, literal, m.counts.formulas(), o.cap);

    // surviving worlds: hard formulas, literal Func and the cardinality clauses
    std::vector<std::uint64_t> worlds;
    std::vector<double> weights;
    double z_ref = 0;
    for (std::uint64_t w = 0; w < ref.world_count(); ++w) {
        auto wt = ref.weight(w);
        if (!wt) continue;
        if (!m.counts.empty() && !m.cardinality(ref.counts(w))) continue;
        worlds.push_back(w);
        weights.push_back(*wt);
        z_ref += *wt;
    }

    bool pass = true;
    auto report = [&](const std::string& what, double lifted, double brute, double tol,
                      bool relative) {
        const double err = std::abs(lifted - brute) / (relative ? 1 + std::abs(brute) : 1.0);
        const bool good = err <= tol;
        pass = pass && good;
        std::cout << (good ? "ok   " : "FAIL ") << what << " lifted=" << format_number(lifted)
                  << " brute=" << format_number(brute) << '\n';
    };

    if (z_ref == 0) {
        try {
            if (p.constraint.psi.empty()) {
                partition_function(p.mln, p.domain);
            } else {
                constrained_partition(p.mln, p.constraint, p.domain);
            }
            std::cout << "FAIL partition: brute force finds no model, lifted does\n";
            return numeric;
        } catch (const infeasible_error&) {
            std::cout << "ok   partition: no model in either engine\n";
            return ok;
        }
    }

    const real z = p.constraint.psi.empty() ? partition_function(p.mln, p.domain).value
                                            : constrained_partition(p.mln, p.constraint, p.domain);
    report("partition", static_cast<double>(z), z_ref, 1e-9, true);

    for (const auto& q : m.queries) {
        GroundCircuit c(q.sentence, ref.space().atoms());
        double hit = 0;
        for (std::size_t i = 0; i < worlds.size(); ++i) hit += c.evaluate(worlds[i]) ? weights[i] : 0;
        report("query " + q.name, static_cast<double>(query_probability(p, q.sentence)),
               hit / z_ref, 1e-9, false);
    }

    if (!m.counts.empty()) {
        CountDistribution q = m.constrained()
                                  ? constrained_distribution(p.mln, p.constraint, p.domain)
                                  : count_distribution(p.mln, p.constraint.psi, p.domain);
        // project the lifted grid (which may carry |R| axes) onto the declared counts
        std::map<std::vector<std::size_t>, double> lifted, brute;
        for (std::size_t i = 0; i < q.grid.size(); ++i) {
            auto n = q.grid.index(i);
            n.resize(m.counts.size());
            lifted[n] += static_cast<double>(q.p[i]);
        }
        for (std::size_t i = 0; i < worlds.size(); ++i) brute[ref.counts(worlds[i])] += weights[i] / z_ref;
        double worst = 0;
        for (const auto& [n, v] : lifted) {
            auto it = brute.find(n);
            worst = std::max(worst, std::abs(v - (it == brute.end() ? 0.0 : it->second)));
        }
        for (const auto& [n, v] : brute) {
            if (!lifted.contains(n)) worst = std::max(worst, v);
        }
        report("countdist max-abs-error", worst, 0.0, 1e-9, false);
    }
    return pass ? ok : numeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact inference for two-variable Markov logic networks"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--brute-cap", o.cap, "Largest ground-atom count for brute force")
        ->capture_default_str();

    auto model_arg = [&](CLI::App* sub) {
        sub->add_option("model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    };
    auto* partition = app.add_subcommand("partition", "Print Z, or Z' under constraints");
    model_arg(partition);
    auto* marginal_cmd = app.add_subcommand("marginal", "Print query probabilities");
    model_arg(marginal_cmd);
    marginal_cmd->add_option("--query", o.query, "Query name from the model, or a sentence");
    auto* countdist = app.add_subcommand("countdist", "Count distribution over the count formulas");
    model_arg(countdist);
    countdist->add_option("--out", o.out, "Output path (default stdout)");
    countdist->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    auto* spectrum = app.add_subcommand("spectrum", "DFT of the count distribution");
    model_arg(spectrum);
    spectrum->add_option("--out", o.out, "Output path (default stdout)");
    auto* fixedpoints = app.add_subcommand("fixedpoints", "Fixed points of random functions");
    fixedpoints->add_option("--n", o.n, "Domain size")->check(CLI::PositiveNumber)
        ->capture_default_str();
    fixedpoints->add_option("--out", o.out, "Output path (default stdout)");
    auto* check = app.add_subcommand("check", "Compare lifted results with brute force");
    model_arg(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return parse;
    }
    set_thread_count(o.threads);

    try {
        if (*partition) return cmd_partition(o);
        if (*marginal_cmd) return cmd_marginal(o);
        if (*countdist) return cmd_countdist(o);
        if (*spectrum) return cmd_spectrum(o);
        if (*fixedpoints) return cmd_fixedpoints(o);
        if (*check) return cmd_check(o);
    } catch (const parse_error& e) {
        std::cerr << (o.model.empty() ? "" : o.model + ":") << e.what() << '\n';
        return parse;
    } catch (const unsupported_error& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return parse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return parse;
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return infeasible;
    } catch (const brute_cap_error& e) {
        std::cerr << e.what() << '\n';
        return brute_cap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numeric;
    }
    return ok;
}
