#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "liftcount/lifted.hpp"
#include "liftcount/mln.hpp"

namespace liftcount {

/// Formulas whose true-grounding counts are tracked, each with a display name.
class CountSpec {
public:
    CountSpec() = default;
    explicit CountSpec(std::vector<Formula> formulas);

    /// Throws std::invalid_argument for more than two variables.
    void add(std::string name, Formula f);

    std::size_t size() const { return formulas_.size(); }
    bool empty() const { return formulas_.empty(); }
    const Formula& formula(std::size_t i) const { return formulas_[i]; }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const std::vector<Formula>& formulas() const { return formulas_; }
    /// Index of a named formula, or size() when absent.
    std::size_t find(std::string_view name) const;

    /// M_j = n^|free vars of beta_j| + 1.
    std::vector<std::size_t> shape(Domain d) const;

private:
    std::vector<Formula> formulas_;
    std::vector<std::string> names_;
};

/// Row-major index grid prod {0..M_j-1}; the last axis varies fastest.
class Grid {
public:
    Grid() = default;
    explicit Grid(std::vector<std::size_t> shape);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return size_; }
    std::size_t flat(std::span<const std::size_t> index) const;
    std::vector<std::size_t> index(std::size_t flat) const;
    /// Distance between consecutive entries along an axis.
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

struct Spectrum {
    Grid grid;
    std::vector<qcomplex> values;
    /// Estimated absolute rounding error of each inverse-transformed entry,
    /// from the term magnitudes of the lifted sums. 0 when unknown.
    real resolution = 0;
};

struct CountDistribution {
    Grid grid;
    std::vector<real> p;
    real partition = 0;  // Z of the underlying MLN
    real resolution = 0;  // see Spectrum

    real at(std::span<const std::size_t> n) const { return p[grid.flat(n)]; }
};

/// N(psi, w) componentwise.
std::vector<std::size_t> count_statistics(const CountSpec& psi, const PossibleWorld& w, Domain d);

/// Discrete Fourier transform along every axis. sign = -1 is the forward
/// transform; sign = +1 with normalize divides by the grid size (inverse).
std::vector<qcomplex> dft(const Grid& grid, std::span<const qcomplex> values, int sign,
                          bool normalize);
inline std::vector<qcomplex> forward_dft(const Grid& g, std::span<const qcomplex> v) {
    return dft(g, v, -1, false);
}
inline std::vector<qcomplex> inverse_dft(const Grid& g, std::span<const qcomplex> v) {
    return dft(g, v, +1, true);
}

/// Inverse transform of a spectrum into a probability array. Throws
/// residue_error when an imaginary part exceeds 1e-6 or an entry is below
/// -1e-9; smaller negative entries become 0.
CountDistribution inverse_dft(const Spectrum& g);

/// Largest frequency grid the engine will evaluate.
inline constexpr std::size_t kMaxGridPoints = std::size_t{1} << 24;

/// Compiles the MLN extended with one indicator per count formula once; the
/// lifted structure is then reused for every frequency and domain size.
class SpectrumEngine {
public:
    SpectrumEngine(const Mln& phi, const CountSpec& psi);

    /// Z of the MLN (all indicator weights 1).
    PartitionValue partition(Domain d) const;
    /// Unnormalised WFOMC with w(xi_j) = exp(-2 pi i k_j / M_j).
    WfomcValue raw_point(std::span<const std::size_t> k, Domain d) const;
    /// raw_point / z.
    qcomplex point(std::span<const std::size_t> k, Domain d, const real& z) const;
    /// Every grid point, in parallel; g(0) = 1. Throws std::length_error
    /// beyond kMaxGridPoints.
    Spectrum full(Domain d) const;

    const CountSpec& spec() const { return psi_; }

private:
    CountSpec psi_;
    std::vector<std::string> count_indicators_;
    Translation translation_;
    LiftedCounter counter_;
};

qcomplex spectrum_point(const Mln& phi, const CountSpec& psi, std::span<const std::size_t> k,
                        Domain d);
Spectrum full_spectrum(const Mln& phi, const CountSpec& psi, Domain d);
CountDistribution count_distribution(const Mln& phi, const CountSpec& psi, Domain d);

/// Header n_1..n_m,value; one row per grid point in flat order.
void write_distribution_csv(std::ostream& out, const CountDistribution& q);
/// Header k_1..k_m,re,im.
void write_spectrum_csv(std::ostream& out, const Spectrum& g);

}  // namespace liftcount
