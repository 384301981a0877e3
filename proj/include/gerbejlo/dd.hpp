#ifndef GERBEJLO_DD_HPP
#define GERBEJLO_DD_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gerbe.hpp"
#include "mixed.hpp"

namespace gerbejlo {

// Multiplies each term by (-1)^{total degree}.
inline MixedForm parity_twist(const MixedForm& f) {
    MixedForm r(f.dim(), f.level());
    for (const auto& [key, b] : f.terms()) {
        SimplexForm even(b.level()), odd(b.level());
        for (const auto& [sk, c] : b.terms()) {
            if ((degree_of(key.dx) + degree_of(sk.second)) & 1) odd.add_term(sk.first, sk.second, c);
            else even.add_term(sk.first, sk.second, c);
        }
        r.add(key, even);
        r.add(key, -odd);
    }
    return r;
}

// Partial products G_1 = g_1, G_i = g_1 .. g_i of a tuple.
inline GroupTuple partial_products(const AbelianGroup& group, const GroupTuple& t) {
    GroupTuple out;
    GroupElement acc = group.identity();
    for (const auto& g : t) {
        acc = group.mul(acc, g);
        out.push_back(acc);
    }
    return out;
}

// The level-k derivation on End E-valued forms over M x Delta^k. It is the
// total differential plus the commutator with the diagonal 1-form
// a_p = omega_p + sum_i t_i alpha(G_i, G_i^-1 p).
class SimplicialConnection {
public:
    SimplicialConnection(GerbeScenario scenario, GroupTuple tuple)
        : scenario_(std::move(scenario)),
          tuple_(std::move(tuple)),
          partial_(gerbejlo::partial_products(scenario_.group(), tuple_)),
          cache_(std::make_shared<Cache>()) {}

    const GerbeScenario& scenario() const { return scenario_; }
    const GroupTuple& tuple() const { return tuple_; }
    const GroupTuple& partial_products() const { return partial_; }
    int level() const { return static_cast<int>(tuple_.size()); }

    MixedForm connection_form(const GroupElement& p) const {
        {
            std::lock_guard lock(cache_->mutex);
            if (auto it = cache_->forms.find(p); it != cache_->forms.end()) return it->second;
        }
        const auto& G = scenario_.group();
        const int k = level();
        MixedForm a = MixedForm::from_manifold(scenario_.omega(p), k);
        for (int i = 1; i <= k; ++i) {
            const auto& gi = partial_[static_cast<std::size_t>(i - 1)];
            a += MixedForm::tensor(scenario_.alpha(gi, G.mul(G.inv(gi), p)), SimplexForm::t(k, i));
        }
        std::lock_guard lock(cache_->mutex);
        return cache_->forms.emplace(p, a).first->second;
    }

    EndForm apply(const EndForm& eta) const { return apply_with(eta, [](const MixedForm& f) { return f.d(); }); }

    // (nabla)^{1,0} + u^-1 d_Delta
    EndForm apply_u(const EndForm& eta) const {
        return apply_with(eta, [](const MixedForm& f) { return f.d_manifold() + f.d_simplex().times_u(-1); });
    }

    // On scalar-valued forms the commutator vanishes.
    MixedForm apply_scalar(const MixedForm& f) const { return f.d(); }

private:
    template <class D>
    EndForm apply_with(const EndForm& eta, D&& d) const {
        EndForm r;
        for (const auto& [idx, f] : eta.entries()) {
            r.add(idx.first, idx.second, d(f));
            r.add(idx.first, idx.second, connection_form(idx.first) * f);
            r.add(idx.first, idx.second, -(parity_twist(f) * connection_form(idx.second)));
        }
        return r;
    }

    struct Cache {
        std::mutex mutex;
        std::map<GroupElement, MixedForm> forms;
    };

    GerbeScenario scenario_;
    GroupTuple tuple_;
    GroupTuple partial_;
    std::shared_ptr<Cache> cache_;
};

// Curvature 2-form at one level: a scalar part plus a lazily evaluated diagonal,
// so that entry p equals diagonal(p) + scalar.
class SimplicialCurvature {
public:
    using Diagonal = std::function<MixedForm(const GroupElement&)>;

    SimplicialCurvature(MixedForm scalar, Diagonal diagonal) : scalar_(std::move(scalar)), diagonal_(std::move(diagonal)) {}

    const MixedForm& scalar() const { return scalar_; }
    MixedForm diagonal(const GroupElement& p) const { return diagonal_(p); }
    MixedForm entry(const GroupElement& p) const { return diagonal_(p) + scalar_; }

    EndForm on(const std::vector<GroupElement>& entries) const {
        EndForm r;
        for (const auto& p : entries) r.add(p, p, entry(p));
        return r;
    }

    // [theta, eta] for an even curvature.
    EndForm commutator(const EndForm& eta) const {
        EndForm r;
        for (const auto& [idx, f] : eta.entries()) {
            r.add(idx.first, idx.second, diagonal(idx.first) * f);
            r.add(idx.first, idx.second, -(f * diagonal(idx.second)));
        }
        return r;
    }

    // u theta^{2,0} + theta^{1,1} (+ u^-1 theta^{0,2}, which vanishes).
    SimplicialCurvature rescaled() const {
        Diagonal d = diagonal_;
        return SimplicialCurvature(scalar_.rescale_by_manifold_degree(-1),
                                   [d](const GroupElement& p) { return d(p).rescale_by_manifold_degree(-1); });
    }

private:
    MixedForm scalar_;
    Diagonal diagonal_;
};

// The scalar correction -sum_i t_i theta_{G_i} + sum_{i<j} (t_i dt_j - t_j dt_i) ^ alpha(G_i, G_i^-1 G_j).
inline MixedForm curvature_scalar(const GerbeScenario& s, const GroupTuple& tuple) {
    const auto& G = s.group();
    const int k = static_cast<int>(tuple.size());
    const int m = s.dim();
    const GroupTuple P = partial_products(G, tuple);
    MixedForm r(m, k);
    for (int i = 1; i <= k; ++i) {
        const auto& gi = P[static_cast<std::size_t>(i - 1)];
        r -= MixedForm::tensor(s.theta(gi), SimplexForm::t(k, i));
        for (int j = i + 1; j <= k; ++j) {
            const auto& gj = P[static_cast<std::size_t>(j - 1)];
            SimplexForm w = SimplexForm::t(k, i) * SimplexForm::dt(k, j) - SimplexForm::t(k, j) * SimplexForm::dt(k, i);
            r += MixedForm::from_simplex(m, w) * MixedForm::from_manifold(s.alpha(gi, G.mul(G.inv(gi), gj)), k);
        }
    }
    return r;
}

inline SimplicialCurvature vartheta(const GerbeScenario& s, const GroupTuple& tuple) {
    SimplicialConnection conn(s, tuple);
    return SimplicialCurvature(curvature_scalar(s, tuple), [conn](const GroupElement& p) { return conn.connection_form(p).d(); });
}

class InternalConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// -sum_i dt_i theta_{G_i} + sum_{i<j} [2 alpha_ij dt_i dt_j - (t_i dt_j - t_j dt_i) d alpha_ij]
inline MixedForm dd_form_closed(const GerbeScenario& s, const GroupTuple& tuple) {
    const auto& G = s.group();
    const int k = static_cast<int>(tuple.size());
    const int m = s.dim();
    const GroupTuple P = partial_products(G, tuple);
    MixedForm r(m, k);
    for (int i = 1; i <= k; ++i) {
        const auto& gi = P[static_cast<std::size_t>(i - 1)];
        r -= MixedForm::tensor(s.theta(gi), SimplexForm::dt(k, i));
        for (int j = i + 1; j <= k; ++j) {
            const auto& gj = P[static_cast<std::size_t>(j - 1)];
            const ManifoldForm a = s.alpha(gi, G.mul(G.inv(gi), gj));
            SimplexForm w = SimplexForm::t(k, i) * SimplexForm::dt(k, j) - SimplexForm::t(k, j) * SimplexForm::dt(k, i);
            r += MixedForm::tensor(a, (SimplexForm::dt(k, i) * SimplexForm::dt(k, j)).scaled(Scalar(2)));
            r -= MixedForm::from_simplex(m, w) * MixedForm::from_manifold(a.d(), k);
        }
    }
    return r;
}

// Diagonal entries touched by the cross-check: a window plus the partial
// products, which is every entry for finite groups.
inline std::vector<GroupElement> probe_entries(const GerbeScenario& s, const GroupTuple& tuple) {
    std::set<GroupElement> e;
    for (const auto& g : s.group().window(1)) e.insert(g);
    for (const auto& g : partial_products(s.group(), tuple)) e.insert(g);
    return {e.begin(), e.end()};
}

// Theta_(k) by the closed formula, verified against nabla applied to theta.
inline MixedForm dd_form(const GerbeScenario& s, const GroupTuple& tuple) {
    MixedForm closed = dd_form_closed(s, tuple);
    SimplicialConnection conn(s, tuple);
    const auto entries = probe_entries(s, tuple);
    EndForm derived = conn.apply(vartheta(s, tuple).on(entries));
    for (const auto& p : entries) {
        auto v = derived.get(p, p);
        MixedForm got = v ? *v : MixedForm(s.dim(), static_cast<int>(tuple.size()));
        if (got != closed)
            throw InternalConsistencyError("Theta mismatch at " + tuple_str(tuple) + " entry " + p.str() + ": closed " + closed.str() +
                                           " vs derived " + got.str());
    }
    return closed;
}

inline CompatibleForm dd_compatible_form(const GerbeScenario& s) {
    return CompatibleForm(s.dim(), [s](const GroupTuple& t) { return dd_form(s, t); }, "Theta");
}

// u^2 Theta^{3,0} + u Theta^{2,1} + Theta^{1,2}
inline CompatibleForm dd_rescaled(const GerbeScenario& s) {
    return dd_compatible_form(s).map([](const MixedForm& f, const GroupTuple&) { return f.rescale_by_manifold_degree(-1); }, "Theta_u");
}

// I_Delta(Theta_(k)) as a form on M.
inline ManifoldForm integrated_dd(const GerbeScenario& s, const GroupTuple& tuple) {
    return dd_form(s, tuple).integrate_simplex().manifold_part(0);
}

struct DDClassReport {
    int checks = 0;
    std::optional<std::string> failure;
    bool passed() const { return !failure.has_value(); }
};

// Level 1 gives -theta_g, level 2 gives alpha(g, h), higher levels vanish.
inline DDClassReport dd_class_via_integration(const GerbeScenario& s, const std::vector<GroupTuple>& samples) {
    DDClassReport rep;
    for (const auto& t : samples) {
        ManifoldForm expected(s.dim());
        if (t.size() == 1) expected = -s.theta(t[0]);
        else if (t.size() == 2) expected = s.alpha(t[0], t[1]);
        ManifoldForm got = integrated_dd(s, t);
        ++rep.checks;
        if (got != expected) {
            rep.failure = "I(Theta) at " + tuple_str(t) + ": " + got.str() + " expected " + expected.str();
            return rep;
        }
    }
    return rep;
}

// Face restrictions of theta, entrywise: face i >= 1 matches the merged tuple,
// face 0 matches the shorter tuple moved by g_1.
inline CompatibilityReport check_curvature_compatibility(const GerbeScenario& s, int k_max, const std::vector<GroupTuple>& samples,
                                                         const std::vector<GroupElement>& entries) {
    CompatibilityReport rep;
    const auto& G = s.group();
    for (const auto& full : samples)
        for (int k = 1; k <= std::min<int>(k_max, static_cast<int>(full.size())); ++k) {
            GroupTuple t(full.begin(), full.begin() + k);
            const SimplicialCurvature top = vartheta(s, t);
            for (int i = 0; i <= k; ++i) {
                const SimplicialCurvature low = vartheta(s, tuple_face(G, i, t));
                for (const auto& p : entries) {
                    MixedForm lhs = top.entry(p).face(i);
                    MixedForm rhs = i == 0 ? low.entry(G.mul(G.inv(t[0]), p)).pullback(s.action(), t[0]) : low.entry(p);
                    ++rep.checks;
                    if (lhs != rhs) {
                        rep.failure = CompatibilityWitness{k, i, t, "entry " + p.str() + ": " + lhs.str() + " vs " + rhs.str()};
                        return rep;
                    }
                }
            }
        }
    return rep;
}

}  // namespace gerbejlo

#endif
