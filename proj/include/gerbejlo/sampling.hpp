#ifndef GERBEJLO_SAMPLING_HPP
#define GERBEJLO_SAMPLING_HPP

// Seeded generators for forms, group tuples and algebra elements; the same
// seed gives the same draws on every run.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gerbe.hpp"
#include "mixed.hpp"

namespace gerbejlo {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return uniform(0, 1) == 1; }

    Rational rational(int span = 5) {
        int num = uniform(-span, span);
        int den = uniform(1, 3);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    Scalar scalar(int order, int span = 5) {
        const int deg = CyclotomicField::get(order).degree;
        std::vector<Rational> c;
        for (int i = 0; i < deg; ++i) c.push_back(coin() ? rational(span) : Rational(0));
        return Scalar(order, std::move(c));
    }

    Scalar nonzero_scalar(int order) {
        for (;;) {
            Scalar s = scalar(order);
            if (!s.is_zero()) return s;
        }
    }

    Lattice lattice(int dim, int radius = 2) {
        Lattice k;
        for (int i = 0; i < dim; ++i) k.push_back(uniform(-radius, radius));
        return k;
    }

    Mask subset(int n) { return n == 0 ? 0u : static_cast<Mask>(uniform(0, (1 << n) - 1)); }

    Mask subset_of_size(int n, int size) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        std::shuffle(idx.begin(), idx.end(), rng_);
        Mask m = 0;
        for (int i = 0; i < size; ++i) m |= Mask(1) << idx[static_cast<std::size_t>(i)];
        return m;
    }

    ManifoldForm manifold_form(int dim, int order, int terms = 3, int degree = -1) {
        ManifoldForm f(dim);
        for (int i = 0; i < terms; ++i) {
            Mask s = degree < 0 ? subset(dim) : subset_of_size(dim, degree);
            f.add_term(lattice(dim), s, scalar(order));
        }
        return f;
    }

    SimplexForm simplex_form(int level, int terms = 3, int degree = -1, int max_exp = 2) {
        SimplexForm f(level);
        for (int i = 0; i < terms; ++i) {
            Exponents e;
            for (int j = 0; j < level; ++j) e.push_back(uniform(0, max_exp));
            Mask s = degree < 0 ? subset(level) : subset_of_size(level, degree);
            f.add_term(std::move(e), s, Scalar(rational()));
        }
        return f;
    }

    MixedForm mixed_form(int dim, int level, int order, int terms = 3) {
        MixedForm f(dim, level);
        for (int i = 0; i < terms; ++i)
            f += MixedForm::tensor(manifold_form(dim, order, 1), simplex_form(level, 2), uniform(-1, 1));
        return f;
    }

    GroupElement element(const AbelianGroup& g, int radius = 2) {
        std::vector<long long> c;
        for (int i = 0; i < g.rank(); ++i) {
            if (i < g.free_rank()) c.push_back(uniform(-radius, radius));
            else c.push_back(uniform(0, static_cast<int>(g.torsion()[static_cast<std::size_t>(i - g.free_rank())]) - 1));
        }
        return g.make(std::move(c));
    }

    GroupTuple tuple(const AbelianGroup& g, int length, int radius = 2) {
        GroupTuple t;
        for (int i = 0; i < length; ++i) t.push_back(element(g, radius));
        return t;
    }

    // Constant plus one low Fourier mode, so traces of products rarely integrate to zero.
    ManifoldForm function(int dim, int order) {
        ManifoldForm f = ManifoldForm::constant(dim, nonzero_scalar(order));
        f.add_term(lattice(dim, 1), 0, scalar(order));
        return f;
    }

    // Every Fourier mode with |k_i| <= radius, each with a nonzero coefficient.
    ManifoldForm trigonometric(int dim, int order, int radius = 1) {
        ManifoldForm f(dim);
        Lattice k(static_cast<std::size_t>(dim), -radius);
        while (true) {
            f.add_term(k, 0, nonzero_scalar(order));
            std::size_t i = 0;
            while (i < k.size() && k[i] == radius) k[i++] = -radius;
            if (i == k.size()) break;
            ++k[i];
        }
        return f;
    }

    EndAlgebra end_element(const GerbeScenario& s, int entries = 3, long long radius = 1) {
        const auto pts = s.group().window(radius);
        EndAlgebra e;
        for (int i = 0; i < entries; ++i) {
            const auto& p = pts[static_cast<std::size_t>(uniform(0, static_cast<int>(pts.size()) - 1))];
            const auto& q = pts[static_cast<std::size_t>(uniform(0, static_cast<int>(pts.size()) - 1))];
            e.add(p, q, function(s.dim(), s.action().cyclotomic_order()));
        }
        return e;
    }

    LSection section(const std::shared_ptr<const GerbeScenario>& s, int support, long long radius = 1) {
        const auto pts = s->group().window(radius);
        LSection a(s);
        for (int i = 0; i < support; ++i)
            a.add(pts[static_cast<std::size_t>(uniform(0, static_cast<int>(pts.size()) - 1))],
                  function(s->dim(), s->action().cyclotomic_order()));
        return a;
    }

    // Sections a_0..a_n whose supports contain `strands` chains g_0, .., g_n with g_0 .. g_n = 1.
    std::vector<LSection> closing_sections(const std::shared_ptr<const GerbeScenario>& s, int n, int strands, int radius = 1) {
        const auto& G = s->group();
        std::vector<LSection> out(static_cast<std::size_t>(n + 1), LSection(s));
        for (int j = 0; j < strands; ++j) {
            GroupElement prod = G.identity();
            for (int i = 0; i < n; ++i) {
                const GroupElement g = element(G, radius);
                out[static_cast<std::size_t>(i)].add(g, function(s->dim(), s->action().cyclotomic_order()));
                prod = G.mul(prod, g);
            }
            out[static_cast<std::size_t>(n)].add(G.inv(prod), function(s->dim(), s->action().cyclotomic_order()));
        }
        return out;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Sum of Whitney forms built from random manifold-valued group cochains, one
// for each simplicial degree p <= max_p, with random u-shifts.
inline CompatibleForm random_compatible_form(const GerbeScenario& s, std::uint64_t seed, int max_p = 2, int manifold_degree = -1) {
    CompatibleForm total;
    bool first = true;
    Sampler gen(seed);
    for (int p = 0; p <= max_p; ++p) {
        const int shift = gen.uniform(-1, 1);
        const std::uint64_t local = seed * 7919u + static_cast<std::uint64_t>(p);
        const int dim = s.dim(), order = s.action().cyclotomic_order();
        auto cochain = [local, dim, order, manifold_degree](const GroupTuple& t) {
            std::uint64_t h = local;
            for (const auto& g : t)
                for (auto c : g.coords) h = h * 131u + static_cast<std::uint64_t>(c + 29);
            Sampler g(h);
            ManifoldForm f(dim);
            for (int i = 0; i < 2; ++i) {
                Mask m = manifold_degree < 0 ? g.subset(dim) : g.subset_of_size(dim, manifold_degree);
                f.add_term(i == 0 ? Lattice(static_cast<std::size_t>(dim), 0) : g.lattice(dim, 1), m, g.nonzero_scalar(order));
            }
            return f;
        };
        CompatibleForm w = whitney_form(s.action(), p, cochain, "w" + std::to_string(p)).times_u(shift);
        total = first ? w : total + w;
        first = false;
    }
    return total;
}

}  // namespace gerbejlo

#endif
