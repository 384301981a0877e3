#ifndef GERBEJLO_MORPHISMS_HPP
#define GERBEJLO_MORPHISMS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gerbe.hpp"
#include "group_cochain.hpp"
#include "jlo.hpp"

namespace gerbejlo {

inline bool odd(long v) { return (v % 2) != 0; }

// (-1)^{k(k+1)/2 + kn} on a homogeneous cochain of group degree k and cyclic degree n.
// Carries (b + uB) + (-1)^{k+n} delta~ to the double complex (delta~, (-1)^k (b + uB)).
template <CyclicAlgebra A>
GroupCochain<A> regrade(const GroupCochain<A>& f) {
    if (f.flavor() != CochainFlavor::homogeneous) throw std::invalid_argument("regrade expects a homogeneous cochain");
    return GroupCochain<A>(
        CochainFlavor::homogeneous,
        [f](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            const long k = static_cast<long>(t.size()) - 1, n = static_cast<long>(r.size());
            UScalar v = f(t, a0, r);
            return odd(k * (k + 1) / 2 + k * n) ? -v : v;
        },
        "R(" + f.name() + ")");
}

// D = (-1)^k (b + uB) on column k.
template <CyclicAlgebra A>
GroupCochain<A> column_differential(const GroupCochain<A>& f) {
    return GroupCochain<A>(
        f.flavor(),
        [f](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            UScalar v = b_plus_uB(f.at(t))(a0, r);
            return odd(f.degree_of(t)) ? -v : v;
        },
        "D(" + f.name() + ")");
}

// -D h, lowering the group degree by one.
template <CyclicAlgebra A>
GroupCochain<A> minus_dh(const GroupModule<A>& mod, const GroupCochain<A>& f) {
    return column_differential(homotopy_h(mod, f)).scaled(Scalar(-1)).memoized();
}

template <CyclicAlgebra A>
GroupCochain<A> minus_dh_power(const GroupModule<A>& mod, GroupCochain<A> f, int times) {
    for (int i = 0; i < times; ++i) f = minus_dh(mod, f);
    return f;
}

// Psi_1^k(c) = (-Dh)^k c - h (-Dh)^{k-1} D c - h (-Dh)^k delta~ c, read on group degree 0.
template <CyclicAlgebra A>
GroupCochain<A> psi1_component(const GroupModule<A>& mod, const GroupCochain<A>& c, int k) {
    const GroupCochain<A> ck = c.restricted_to_degree(k).memoized();
    GroupCochain<A> r = minus_dh_power(mod, ck, k) - homotopy_h(mod, minus_dh_power(mod, homogeneous_delta(ck), k));
    if (k > 0) r = r - homotopy_h(mod, minus_dh_power(mod, column_differential(ck), k - 1));
    return r.restricted_to_degree(0);
}

// Sum of the components up to the largest group degree carried by c.
template <CyclicAlgebra A>
GroupCochain<A> psi1(const GroupModule<A>& mod, const GroupCochain<A>& c, int max_degree) {
    if (c.flavor() != CochainFlavor::homogeneous) throw std::invalid_argument("psi1 expects a homogeneous cochain");
    GroupCochain<A> total = psi1_component(mod, c, 0);
    for (int k = 1; k <= max_degree; ++k) total = total + psi1_component(mod, c, k);
    return GroupCochain<A>(
               total.flavor(), [total](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) { return total(t, a0, r); },
               "Psi1(" + c.name() + ")")
        .memoized();
}

// A Gamma-invariant degree-0 cochain as a cyclic cochain, read at the identity.
template <CyclicAlgebra A>
CyclicCochain<A> invariant_part(const GroupModule<A>& mod, const GroupCochain<A>& f) {
    return f.at(GroupTuple{mod.group.identity()});
}

// Psi_2(c)(a_{g0}~, a_{g1}, .., a_{gn}) = c(E_{1,G0}(a_{g0}~), .., E_{G_{i-1},G_i}(mu(G_{i-1}, g_i) a_{g_i}^{G_{i-1}}), ..)
// with G_i = g0 .. gi, extended multilinearly over the supports.
inline CyclicCochain<LSection> psi2(const GerbeScenario& s, const CyclicCochain<EndAlgebra>& c) {
    return CyclicCochain<LSection>(
        [s, c](const Unitized<LSection>& a0, const std::vector<LSection>& rest) {
            UScalar total;
            std::vector<std::pair<GroupElement, ManifoldForm>> lead(a0.element.values().begin(), a0.element.values().end());
            std::vector<std::vector<std::pair<GroupElement, ManifoldForm>>> parts;
            for (const auto& a : rest) parts.emplace_back(a.values().begin(), a.values().end());
            auto run = [&](const GroupElement& start, const Unitized<EndAlgebra>& head) {
                std::vector<EndAlgebra> args(rest.size());
                auto rec = [&](auto&& self, std::size_t i, const GroupElement& prefix) -> void {
                    if (i == rest.size()) {
                        total += c(head, args);
                        return;
                    }
                    for (const auto& [g, f] : parts[i]) {
                        const GroupElement next = s.group().mul(prefix, g);
                        args[i] = EndAlgebra::elementary(prefix, next, s.mu(prefix, g).as_form() * s.pull(prefix, f));
                        self(self, i + 1, next);
                    }
                };
                rec(rec, 0, start);
            };
            for (const auto& [g0, f0] : lead) run(g0, Unitized<EndAlgebra>::of(s.embed(g0, f0)));
            if (!a0.unit.is_zero()) run(s.group().identity(), Unitized<EndAlgebra>{EndAlgebra(), a0.unit});
            return total;
        },
        "Psi2(" + c.name() + ")");
}

// Phi = Psi_2 Psi_1 R Psi_0 tau on a compatible form.
struct Pipeline {
    GerbeScenario scenario;
    int max_degree = 3;
    JLOOptions options{};

    CyclicCochain<LSection> operator()(const CompatibleForm& omega) const {
        const auto mod = scenario.end_module();
        JLOCharacter tau(scenario, omega, options);
        const auto homogeneous = regrade(psi0(mod, tau.cochain())).memoized();
        return psi2(scenario, invariant_part(mod, psi1(mod, homogeneous, max_degree)));
    }
};

struct PipelineSample {
    Unitized<LSection> leading;
    std::vector<LSection> rest;
};

struct PipelineTerms {
    UScalar cyclic;   // (b + uB) Phi(omega)
    UScalar twisted;  // Phi(Dtw omega)
    bool holds() const { return cyclic == twisted; }
    bool degenerate() const { return cyclic.is_zero() && twisted.is_zero(); }
};

inline PipelineTerms pipeline_terms(const Pipeline& phi, const CompatibleForm& omega, const PipelineSample& x) {
    PipelineTerms t;
    t.cyclic = b_plus_uB(phi(omega))(x.leading, x.rest);
    t.twisted = phi(twisted_differential(omega, dd_rescaled(phi.scenario)))(x.leading, x.rest);
    return t;
}

inline ChainReport pipeline_check(const Pipeline& phi, const CompatibleForm& omega, const std::vector<PipelineSample>& samples) {
    ChainReport rep;
    for (const auto& x : samples) {
        PipelineTerms t;
        try {
            t = pipeline_terms(phi, omega, x);
        } catch (const std::domain_error&) {
            ++rep.skipped;
            continue;
        }
        ++rep.checks;
        if (!t.degenerate()) ++rep.nondegenerate;
        if (!t.holds() && !rep.failure)
            rep.failure = "n=" + std::to_string(x.rest.size()) + " lead " + x.leading.element.str() + ": (b+uB)Phi " + t.cyclic.str() +
                          " Phi(Dtw) " + t.twisted.str();
    }
    return rep;
}

}  // namespace gerbejlo

#endif
