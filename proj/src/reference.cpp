#include "liftcount/reference.hpp"

#include <cmath>

#include "liftcount/parallel.hpp"

namespace liftcount {

namespace {

std::vector<GroundCircuit> ground_all(const Formula& f, const AtomTable& atoms) {
    std::vector<GroundCircuit> out;
    for (const auto& g : groundings(f, atoms.domain())) out.emplace_back(g, atoms);
    return out;
}

}  // namespace

ReferenceModel::ReferenceModel(const Mln& phi, Domain d, std::vector<Formula> extra_hard,
                               std::vector<Formula> psi, std::size_t cap)
    : space_(phi.vocabulary(), d, cap) {
    const AtomTable& atoms = space_.atoms();
    for (const auto& wf : phi.formulas()) {
        if (wf.hard()) {
            hard_.emplace_back(universal_closure(wf.formula), atoms);
        } else {
            soft_.push_back({wf.weight, ground_all(wf.formula, atoms)});
        }
    }
    for (const auto& s : extra_hard) hard_.emplace_back(s, atoms);
    for (const auto& b : psi) psi_.push_back(ground_all(b, atoms));
}

std::optional<double> ReferenceModel::weight(std::uint64_t world) const {
    for (const auto& h : hard_) {
        if (!h.evaluate(world)) return std::nullopt;
    }
    double log_weight = 0;
    for (const auto& s : soft_) {
        std::size_t n = 0;
        for (const auto& g : s.groundings) n += g.evaluate(world) ? 1 : 0;
        log_weight += s.weight * static_cast<double>(n);
    }
    return std::exp(log_weight);
}

std::vector<std::size_t> ReferenceModel::counts(std::uint64_t world) const {
    std::vector<std::size_t> out;
    out.reserve(psi_.size());
    for (const auto& gs : psi_) {
        std::size_t n = 0;
        for (const auto& g : gs) n += g.evaluate(world) ? 1 : 0;
        out.push_back(n);
    }
    return out;
}

double ReferenceModel::partition() const {
    const std::uint64_t total = world_count();
    std::vector<double> partial(block_count(total), 0.0);
    parallel_blocks(total, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
        double s = 0;
        for (std::uint64_t m = lo; m < hi; ++m) {
            if (auto wt = weight(m)) s += *wt;
        }
        partial[b] = s;
    });
    double z = 0;
    for (double p : partial) z += p;
    return z;
}

double ReferenceModel::mass(const Formula& sentence) const {
    GroundCircuit c(sentence, space_.atoms());
    const std::uint64_t total = world_count();
    std::vector<double> partial(block_count(total), 0.0);
    parallel_blocks(total, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
        double s = 0;
        for (std::uint64_t m = lo; m < hi; ++m) {
            if (!c.evaluate(m)) continue;
            if (auto wt = weight(m)) s += *wt;
        }
        partial[b] = s;
    });
    double z = 0;
    for (double p : partial) z += p;
    return z;
}

std::map<std::vector<std::size_t>, double> ReferenceModel::count_mass() const {
    const std::uint64_t total = world_count();
    std::vector<std::map<std::vector<std::size_t>, double>> partial(block_count(total));
    parallel_blocks(total, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
        auto& out = partial[b];
        for (std::uint64_t m = lo; m < hi; ++m) {
            if (auto wt = weight(m)) out[counts(m)] += *wt;
        }
    });
    std::map<std::vector<std::size_t>, double> merged;
    for (const auto& p : partial) {
        for (const auto& [k, v] : p) merged[k] += v;
    }
    return merged;
}

}  // namespace liftcount
