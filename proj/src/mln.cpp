#include "liftcount/mln.hpp"

#include <cmath>
#include <stdexcept>

#include "liftcount/errors.hpp"

namespace liftcount {

void Mln::add(Formula f, double weight) {
    if (std::isnan(weight) || weight == -kHardWeight) {
        throw std::invalid_argument("weight must be finite or +inf");
    }
    for (const auto& p : predicates_of(f)) {
        if (!vocab_.contains(p)) throw std::invalid_argument("undeclared predicate '" + p + "'");
    }
    if (all_variables(f).size() > 2) {
        throw std::invalid_argument("formula uses more than two variables: " + to_string(f));
    }
    formulas_.push_back({std::move(f), weight});
}

std::string Translation::add_indicator(const Formula& f) {
    std::string name;
    int counter = 0;
    do {
        name = "$xi" + std::to_string(counter++);
    } while (vocabulary.contains(name));
    auto vars = free_variables(f);
    vocabulary.add({name, static_cast<int>(vars.size())});
    std::vector<Term> args;
    for (const auto& v : vars) args.push_back(Term::var(v));
    gamma.push_back(universal_closure(Formula::equivalence(Formula::atom(name, args), f)));
    return name;
}

Translation translate_mln(const Mln& phi) {
    Translation t;
    t.vocabulary = phi.vocabulary();
    for (const auto& wf : phi.formulas()) {
        if (wf.hard()) {
            t.gamma.push_back(universal_closure(wf.formula));
            continue;
        }
        std::string xi = t.add_indicator(wf.formula);
        t.w.set(xi, qcomplex(boost::multiprecision::exp(real(wf.weight))));
        t.indicators.push_back(xi);
    }
    return t;
}

real checked_real(const WfomcValue& v, const char* what) {
    const real re = v.value.re;
    const real im = v.value.im;
    const real scale = 1 + boost::multiprecision::abs(re);
    if (boost::multiprecision::abs(im) > real(1e-9) * scale) {
        throw residue_error(std::string(what) + " has imaginary residue " + format_number(im));
    }
    // cancellation noise in quad precision stays far below this
    const real zero_band = real(1e-24) * v.magnitude;
    if (boost::multiprecision::abs(re) <= zero_band) {
        throw infeasible_error(std::string(what) + " is zero: no world satisfies the hard constraints");
    }
    if (re < 0) {
        throw residue_error(std::string(what) + " is negative: " + format_number(re));
    }
    return re;
}

PartitionValue partition_function(const Mln& phi, Domain d) {
    Translation t = translate_mln(phi);
    WfomcValue v = lifted_wfomc(t.gamma, t.vocabulary, t.w, t.wbar, d);
    return {checked_real(v, "partition function"), v.value, v.magnitude};
}

real marginal(const Mln& phi, const Formula& gamma, Domain d) {
    if (!free_variables(gamma).empty()) {
        throw std::invalid_argument("query must be a sentence: " + to_string(gamma));
    }
    Translation t = translate_mln(phi);
    const real z = checked_real(lifted_wfomc(t.gamma, t.vocabulary, t.w, t.wbar, d),
                                "partition function");
    t.gamma.push_back(gamma);
    WfomcValue num = lifted_wfomc(t.gamma, t.vocabulary, t.w, t.wbar, d);
    if (boost::multiprecision::abs(num.value.im) > real(1e-9) * (1 + z)) {
        throw residue_error("query count has imaginary residue " + format_number(num.value.im));
    }
    real p = num.value.re / z;
    if (p < 0 && p >= real(-1e-9)) p = 0;
    if (p > 1 && p <= real(1 + 1e-9)) p = 1;
    if (p < 0 || p > 1) throw residue_error("marginal outside [0,1]: " + format_number(p));
    return p;
}

}  // namespace liftcount
