#include "liftcount/spectrum.hpp"

#include <limits>
#include <stdexcept>

#include "liftcount/errors.hpp"
#include "liftcount/parallel.hpp"

namespace liftcount {

CountSpec::CountSpec(std::vector<Formula> formulas) {
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        add("beta" + std::to_string(i + 1), std::move(formulas[i]));
    }
}

void CountSpec::add(std::string name, Formula f) {
    if (all_variables(f).size() > 2) {
        throw std::invalid_argument("count formula uses more than two variables: " + to_string(f));
    }
    names_.push_back(std::move(name));
    formulas_.push_back(std::move(f));
}

std::size_t CountSpec::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return names_.size();
}

std::vector<std::size_t> CountSpec::shape(Domain d) const {
    std::vector<std::size_t> m;
    for (const auto& f : formulas_) {
        std::size_t groundings = 1;
        for (std::size_t i = 0; i < free_variables(f).size(); ++i) groundings *= d.size();
        m.push_back(groundings + 1);
    }
    return m;
}

// ---------------------------------------------------------------------------

Grid::Grid(std::vector<std::size_t> shape) : shape_(std::move(shape)), strides_(shape_.size()) {
    for (std::size_t a = shape_.size(); a-- > 0;) {
        if (shape_[a] == 0) throw std::invalid_argument("grid axis of length 0");
        strides_[a] = size_;
        size_ *= shape_[a];
    }
}

std::size_t Grid::flat(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw std::invalid_argument("grid index rank mismatch");
    std::size_t f = 0;
    for (std::size_t a = 0; a < shape_.size(); ++a) {
        if (index[a] >= shape_[a]) throw std::out_of_range("grid index out of range");
        f += index[a] * strides_[a];
    }
    return f;
}

std::vector<std::size_t> Grid::index(std::size_t flat) const {
    std::vector<std::size_t> idx(shape_.size());
    for (std::size_t a = 0; a < shape_.size(); ++a) {
        idx[a] = flat / strides_[a];
        flat %= strides_[a];
    }
    return idx;
}

std::vector<std::size_t> count_statistics(const CountSpec& psi, const PossibleWorld& w, Domain d) {
    std::vector<std::size_t> out;
    for (const auto& f : psi.formulas()) out.push_back(count_true_groundings(f, w, d));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<qcomplex> dft(const Grid& grid, std::span<const qcomplex> values, int sign,
                          bool normalize) {
    if (values.size() != grid.size()) throw std::invalid_argument("dft: size mismatch");
    std::vector<qcomplex> cur(values.begin(), values.end());
    std::vector<qcomplex> next(cur.size());
    for (std::size_t a = 0; a < grid.rank(); ++a) {
        const std::size_t m = grid.shape()[a];
        const std::size_t stride = grid.stride(a);
        std::vector<qcomplex> roots(m);
        for (std::size_t t = 0; t < m; ++t) {
            roots[t] = unit_root(static_cast<std::int64_t>(t), static_cast<std::int64_t>(m), sign);
        }
        // each line along axis a starts at an index whose a-coordinate is 0
        for (std::size_t start = 0; start < grid.size(); ++start) {
            if ((start / stride) % m != 0) continue;
            for (std::size_t k = 0; k < m; ++k) {
                qcomplex s;
                for (std::size_t n = 0; n < m; ++n) s += cur[start + n * stride] * roots[(k * n) % m];
                next[start + k * stride] = s;
            }
        }
        std::swap(cur, next);
    }
    if (normalize) {
        const real scale = real(1) / real(grid.size());
        for (auto& z : cur) {
            z.re *= scale;
            z.im *= scale;
        }
    }
    return cur;
}

CountDistribution inverse_dft(const Spectrum& g) {
    auto q = inverse_dft(g.grid, g.values);
    CountDistribution out{g.grid, std::vector<real>(q.size()), 0, g.resolution};
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (boost::multiprecision::abs(q[i].im) > real(1e-6)) {
            throw residue_error("count distribution entry " + std::to_string(i) +
                                " has imaginary residue " + format_number(q[i].im));
        }
        real p = q[i].re;
        if (p < 0) {
            if (p < real(-1e-9)) {
                throw residue_error("count distribution entry " + std::to_string(i) +
                                    " is negative: " + format_number(p));
            }
            p = 0;
        }
        out.p[i] = p;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

Translation extend(const Mln& phi, const CountSpec& psi, std::vector<std::string>& names) {
    if (psi.empty()) throw std::invalid_argument("count specification is empty");
    Translation t = translate_mln(phi);
    for (const auto& f : psi.formulas()) {
        for (const auto& p : predicates_of(f)) {
            if (!phi.vocabulary().contains(p)) {
                throw std::invalid_argument("undeclared predicate '" + p + "' in count formula");
            }
        }
        names.push_back(t.add_indicator(f));
    }
    return t;
}

}  // namespace

SpectrumEngine::SpectrumEngine(const Mln& phi, const CountSpec& psi)
    : psi_(psi),
      translation_(extend(phi, psi, count_indicators_)),
      counter_(translation_.gamma, translation_.vocabulary) {}

PartitionValue SpectrumEngine::partition(Domain d) const {
    WfomcValue v = counter_.count(translation_.w, translation_.wbar, d);
    return {checked_real(v, "partition function"), v.value, v.magnitude};
}

WfomcValue SpectrumEngine::raw_point(std::span<const std::size_t> k, Domain d) const {
    const auto shape = psi_.shape(d);
    if (k.size() != shape.size()) throw std::invalid_argument("frequency rank mismatch");
    WeightFunction w = translation_.w;
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (k[j] >= shape[j]) throw std::out_of_range("frequency outside grid");
        w.set(count_indicators_[j], unit_root(static_cast<std::int64_t>(k[j]),
                                              static_cast<std::int64_t>(shape[j]), -1));
    }
    return counter_.count(w, translation_.wbar, d);
}

qcomplex SpectrumEngine::point(std::span<const std::size_t> k, Domain d, const real& z) const {
    return raw_point(k, d).value / qcomplex(z);
}

Spectrum SpectrumEngine::full(Domain d) const {
    const auto shape = psi_.shape(d);
    long double points = 1;
    for (auto m : shape) points *= static_cast<long double>(m);
    if (points > static_cast<long double>(kMaxGridPoints)) {
        throw std::length_error("count grid has " + format_number(static_cast<double>(points)) +
                                " points, more than " + std::to_string(kMaxGridPoints));
    }
    const real z = partition(d).value;
    Spectrum g{Grid(shape), {}, 0};
    g.values.resize(g.grid.size());
    std::vector<real> magnitude(g.grid.size());
    parallel_blocks(g.grid.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            WfomcValue v = raw_point(g.grid.index(i), d);
            g.values[i] = v.value / qcomplex(z);
            magnitude[i] = v.magnitude / z;
        }
    });
    real mean = 0;
    for (const auto& m : magnitude) mean += m;
    mean /= real(g.grid.size());
    g.resolution = 64 * std::numeric_limits<real>::epsilon() * mean;
    return g;
}

qcomplex spectrum_point(const Mln& phi, const CountSpec& psi, std::span<const std::size_t> k,
                        Domain d) {
    SpectrumEngine e(phi, psi);
    return e.point(k, d, e.partition(d).value);
}

Spectrum full_spectrum(const Mln& phi, const CountSpec& psi, Domain d) {
    return SpectrumEngine(phi, psi).full(d);
}

CountDistribution count_distribution(const Mln& phi, const CountSpec& psi, Domain d) {
    SpectrumEngine e(phi, psi);
    const real z = e.partition(d).value;
    CountDistribution q = inverse_dft(e.full(d));
    q.partition = z;
    return q;
}

// ---------------------------------------------------------------------------

void write_distribution_csv(std::ostream& out, const CountDistribution& q) {
    for (std::size_t a = 0; a < q.grid.rank(); ++a) out << "n_" << a + 1 << ',';
    out << "value\n";
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
        for (auto n : q.grid.index(i)) out << n << ',';
        out << format_number(q.p[i]) << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& g) {
    for (std::size_t a = 0; a < g.grid.rank(); ++a) out << "k_" << a + 1 << ',';
    out << "re,im\n";
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
        for (auto k : g.grid.index(i)) out << k << ',';
        out << format_number(g.values[i].re) << ',' << format_number(g.values[i].im) << '\n';
    }
}

}  // namespace liftcount
