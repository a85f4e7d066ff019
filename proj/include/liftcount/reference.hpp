#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "liftcount/brute.hpp"
#include "liftcount/mln.hpp"

namespace liftcount {

/// Direct evaluation of the MLN distribution world by world, without any
/// WFOMC encoding: weight(w) = exp(sum_j w_j N(alpha_j, w)) when every hard
/// formula (as its universal closure) and every extra sentence holds, else 0.
/// Extra sentences may use equality and any number of variables.
class ReferenceModel {
public:
    ReferenceModel(const Mln& phi, Domain d, std::vector<Formula> extra_hard = {},
                   std::vector<Formula> psi = {}, std::size_t cap = kDefaultBruteCap);

    const WorldSpace& space() const { return space_; }
    std::uint64_t world_count() const { return space_.count(); }

    /// Unnormalised weight; nullopt for excluded worlds.
    std::optional<double> weight(std::uint64_t world) const;
    /// N(psi, world).
    std::vector<std::size_t> counts(std::uint64_t world) const;

    double partition() const;
    /// Total weight of worlds satisfying the sentence.
    double mass(const Formula& sentence) const;
    /// Unnormalised weight aggregated by count vector (only nonzero entries).
    std::map<std::vector<std::size_t>, double> count_mass() const;

private:
    struct Soft {
        double weight;
        std::vector<GroundCircuit> groundings;
    };

    WorldSpace space_;
    std::vector<GroundCircuit> hard_;
    std::vector<Soft> soft_;
    std::vector<std::vector<GroundCircuit>> psi_;
};

}  // namespace liftcount
