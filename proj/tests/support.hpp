#ifndef GERBEJLO_TESTS_SUPPORT_HPP
#define GERBEJLO_TESTS_SUPPORT_HPP

// Hand-rolled generators shared by the test suites.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <random>
#include <vector>

#include "gerbejlo/gerbe.hpp"
#include "gerbejlo/mixed.hpp"
#include "gerbejlo/sampling.hpp"

namespace gerbejlo::testing {

// Iterated integration over the simplex: integrate t_k from 0 to 1 - t_1 - ... - t_{k-1},
// then t_{k-1}, and so on, with explicit multivariate polynomials.
using Poly = std::map<std::vector<int>, Rational>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e = ea;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            r[e] += ca * cb;
        }
    return r;
}

inline Rational iterated_simplex_integral(const std::vector<int>& exps) {
    const std::size_t n = exps.size();
    Poly p{{exps, Rational(1)}};
    for (std::size_t var = n; var-- > 0;) {
        // upper limit L = 1 - t_0 - ... - t_{var-1}
        Poly limit;
        std::vector<int> zero(n, 0);
        limit[zero] = 1;
        for (std::size_t j = 0; j < var; ++j) {
            std::vector<int> e(n, 0);
            e[j] = 1;
            limit[e] = -1;
        }
        Poly next;
        for (const auto& [e, c] : p) {
            int k = e[var];
            Poly power{{zero, Rational(1)}};
            for (int i = 0; i <= k; ++i) power = poly_mul(power, limit);
            std::vector<int> rest = e;
            rest[var] = 0;
            Poly coeff{{rest, c / (k + 1)}};
            for (const auto& [e2, c2] : poly_mul(coeff, power)) next[e2] += c2;
        }
        p = std::move(next);
    }
    Rational total = 0;
    for (const auto& [e, c] : p) total += c;
    return total;
}


using Gen = gerbejlo::Sampler;
using gerbejlo::random_compatible_form;

// m = 1, N = 4, Z/4 acting by a quarter turn; omega_g = g e_1 dx and a cocycle
// mixing a root of unity with a coboundary in the Fourier modes.
inline GerbeScenario quarter_turn_gerbe() {
    AffineMap a = AffineMap::identity(1);
    a.shift[0] = Rational(1, 4);
    TorusAction act(AbelianGroup(0, {4}), 1, 4, {a});
    auto omega = [](const GroupElement& g) { return ManifoldForm::monomial(1, {1}, 1, Scalar(static_cast<long>(g.coords[0]))); };
    auto mu = [](const GroupElement& g, const GroupElement& h) {
        const long x = static_cast<long>(g.coords[0]), y = static_cast<long>(h.coords[0]);
        const long phase = x * (y != 0) + (x + y >= 4);
        const int mode = (x != 0) + (y != 0) - ((x + y) % 4 != 0);
        return UnitFunction{Scalar::zeta_power(4, phase), Lattice{mode}};
    };
    return GerbeScenario(act, omega, mu);
}

// Z acting on the circle by a quarter turn with mu = zeta^{gh}.
inline GerbeScenario integer_gerbe() {
    AffineMap a = AffineMap::identity(1);
    a.shift[0] = Rational(1, 4);
    TorusAction act(AbelianGroup(1, {}), 1, 4, {a});
    auto omega = [](const GroupElement& g) { return ManifoldForm::monomial(1, {1}, 1, Scalar(static_cast<long>(g.coords[0]))); };
    auto mu = [](const GroupElement& g, const GroupElement& h) {
        return UnitFunction{Scalar::zeta_power(4, static_cast<long>(g.coords[0] * h.coords[0])), Lattice{0}};
    };
    return GerbeScenario(act, omega, mu);
}

// m = 2, N = 4, Z/2 acting by x -> -x + (1/2, 1/2); the connection has curvature.
inline GerbeScenario inversion_gerbe() {
    AffineMap a = AffineMap::identity(2);
    a.matrix = {{-1, 0}, {0, -1}};
    a.shift = {Rational(1, 2), Rational(1, 2)};
    TorusAction act(AbelianGroup(0, {2}), 2, 4, {a});
    auto omega = [](const GroupElement& g) {
        ManifoldForm w = ManifoldForm::monomial(2, {1, 0}, 2, Scalar(1)) + ManifoldForm::dx(2, 0);
        return w.scaled(Scalar(static_cast<long>(g.coords[0])));
    };
    auto mu = [](const GroupElement& g, const GroupElement& h) {
        return UnitFunction{Scalar::zeta_power(4, static_cast<long>(2 * g.coords[0] * h.coords[0])), Lattice{0, 0}};
    };
    return GerbeScenario(act, omega, mu);
}

inline Scalar integrate_function(const ManifoldForm& f) { return (f * ManifoldForm::volume(f.dim())).integrate(); }

// Random cochain a~0, a1..an -> int tr((a0 + lambda) Y0 a1 Y1 .. an Yn) with the
// Y_i drawn once from the seed; it is not a trace, so every identity is exercised.
class TraceTypeCochain {
public:
    TraceTypeCochain(const GerbeScenario& s, std::uint64_t seed, int slots = 8) : dim_(s.dim()) {
        Gen gen(seed);
        for (int i = 0; i < slots; ++i) weights_.push_back(diagonal_unit(s) + gen.end_element(s, 3));
    }

    UScalar operator()(const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) const {
        if (rest.size() + 1 > weights_.size()) throw std::out_of_range("trace-type cochain arity");
        EndAlgebra x = left_multiply(a0, weights_[0]).element;
        for (std::size_t i = 0; i < rest.size(); ++i) x = x * rest[i] * weights_[i + 1];
        UScalar v;
        v.add_term(0, integrate_function(x.trace(ManifoldForm(dim_))));
        return v;
    }

    CyclicCochain<EndAlgebra> cochain() const {
        TraceTypeCochain self = *this;
        return CyclicCochain<EndAlgebra>([self](const auto& a0, const auto& r) { return self(a0, r); }, "tr");
    }

private:
    static EndAlgebra diagonal_unit(const GerbeScenario& s) {
        EndAlgebra e;
        for (const auto& p : s.group().window(1)) e.add(p, p, ManifoldForm::constant(s.dim(), Scalar(1)));
        return e;
    }

    int dim_;
    std::vector<EndAlgebra> weights_;
};

// int tr(a~0 W0 [W1, a1] .. [Wn, an]): vanishes as soon as a non-leading argument
// is the unit of the algebra, so splitting the adjoined unit over the group is harmless.
class NormalizedTraceCochain {
public:
    NormalizedTraceCochain(const GerbeScenario& s, std::uint64_t seed, int slots = 8) : dim_(s.dim()) {
        Gen gen(seed);
        for (int i = 0; i < slots; ++i) weights_.push_back(gen.end_element(s, 4));
    }

    UScalar operator()(const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) const {
        if (rest.size() + 1 > weights_.size()) throw std::out_of_range("trace-type cochain arity");
        EndAlgebra x = left_multiply(a0, weights_[0]).element;
        for (std::size_t i = 0; i < rest.size(); ++i) x = x * (weights_[i + 1] * rest[i] - rest[i] * weights_[i + 1]);
        UScalar v;
        v.add_term(0, integrate_function(x.trace(ManifoldForm(dim_))));
        return v;
    }

private:
    int dim_;
    std::vector<EndAlgebra> weights_;
};

// int tr(a~0 W0 a1 W1 .. an Wn) averaged over a finite group, with diagonal
// weights W_i: a Gamma-invariant cochain that only sees closed index chains.
inline CyclicCochain<EndAlgebra> invariant_trace_cochain(const GerbeScenario& s, std::uint64_t seed, int slots = 8) {
    if (!s.group().is_finite()) throw std::invalid_argument("averaging needs a finite group");
    Gen gen(seed);
    std::vector<EndAlgebra> weights;
    for (int i = 0; i < slots; ++i) {
        EndAlgebra w;
        for (const auto& p : s.group().window(0)) w.add(p, p, gen.function(s.dim(), 4));
        weights.push_back(w);
    }
    const int dim = s.dim();
    auto raw = [weights, dim](const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) {
        if (rest.size() + 1 > weights.size()) throw std::out_of_range("trace-type cochain arity");
        EndAlgebra x = left_multiply(a0, weights[0]).element;
        for (std::size_t i = 0; i < rest.size(); ++i) x = x * rest[i] * weights[i + 1];
        UScalar v;
        v.add_term(0, integrate_function(x.trace(ManifoldForm(dim))));
        return v;
    };
    return CyclicCochain<EndAlgebra>(
        [s, raw](const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) {
            UScalar total;
            for (const auto& g : s.group().window(0)) {
                std::vector<EndAlgebra> moved;
                for (const auto& a : rest) moved.push_back(s.act(g, a));
                total += raw(Unitized<EndAlgebra>{s.act(g, a0.element), a0.unit}, moved);
            }
            return total;
        },
        "avg tr");
}

// Every generating relation of the simplex category with target [n], n <= top.
// Returns a description of the first violated relation.
inline std::optional<std::string> cosimplicial_relation_failure(int top) {
    using D = DeltaMorphism;
    for (int n = 1; n <= top; ++n) {
        // delta_j delta_i = delta_i delta_{j-1}, i < j, into [n+1]
        for (int j = 0; j <= n + 1; ++j)
            for (int i = 0; i < j; ++i)
                if (compose(D::face(n + 1, j), D::face(n, i)) != compose(D::face(n + 1, i), D::face(n, j - 1)))
                    return "face-face n=" + std::to_string(n) + " i=" + std::to_string(i) + " j=" + std::to_string(j);
    }
    for (int n = 0; n <= top; ++n) {
        // sigma_j sigma_i = sigma_i sigma_{j+1}, i <= j
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= j; ++i)
                if (compose(D::degeneracy(n, j), D::degeneracy(n + 1, i)) != compose(D::degeneracy(n, i), D::degeneracy(n + 1, j + 1)))
                    return "degeneracy-degeneracy n=" + std::to_string(n) + " i=" + std::to_string(i) + " j=" + std::to_string(j);
        // sigma_j delta_i
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n + 1; ++i) {
                const D lhs = compose(D::degeneracy(n, j), D::face(n + 1, i));
                D rhs = D::identity(n);
                if (i < j) rhs = compose(D::face(n, i), D::degeneracy(n - 1, j - 1));
                if (i > j + 1) rhs = compose(D::face(n, i - 1), D::degeneracy(n - 1, j));
                if (lhs != rhs) return "degeneracy-face n=" + std::to_string(n) + " i=" + std::to_string(i) + " j=" + std::to_string(j);
            }
    }
    return std::nullopt;
}

// Group cochain whose value on each tuple is an independent trace-type cochain.
template <class Trace = TraceTypeCochain>
GroupCochain<EndAlgebra> random_group_cochain(const GerbeScenario& s, std::uint64_t seed, CochainFlavor flavor) {
    auto cache = std::make_shared<std::map<GroupTuple, Trace>>();
    return GroupCochain<EndAlgebra>(
        flavor,
        [s, seed, cache](const GroupTuple& t, const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& r) {
            auto it = cache->find(t);
            if (it == cache->end()) {
                std::uint64_t h = seed * 1000003u + t.size();
                for (const auto& g : t)
                    for (auto c : g.coords) h = h * 31u + static_cast<std::uint64_t>(c + 17);
                it = cache->emplace(t, Trace(s, h)).first;
            }
            return it->second(a0, r);
        },
        "phi");
}

}  // namespace gerbejlo::testing

#endif
