#ifndef GERBEJLO_MIXED_HPP
#define GERBEJLO_MIXED_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exact.hpp"
#include "simplex.hpp"
#include "simplicial.hpp"
#include "torus.hpp"

namespace gerbejlo {

// Manifold factor of a mixed term: u^power e_k dx_S.
struct ManifoldKey {
    int u = 0;
    Lattice k;
    Mask dx = 0;
    auto operator<=>(const ManifoldKey&) const = default;
    bool operator==(const ManifoldKey&) const = default;
};

// Elements of Omega(T^m) (x) Omega(Delta^k) [u, u^-1], stored as sums of
// (u^j e_k dx_S) ^ beta with the manifold factor on the left.
class MixedForm {
public:
    MixedForm() = default;
    MixedForm(int dim, int level) : dim_(dim), level_(level) {}

    static MixedForm tensor(const ManifoldForm& a, const SimplexForm& b, int u_power = 0) {
        MixedForm r(a.dim(), b.level());
        if (b.is_zero()) return r;
        for (const auto& [key, c] : a.terms()) r.add(ManifoldKey{u_power, key.first, key.second}, b.scaled(c));
        return r;
    }
    static MixedForm from_manifold(const ManifoldForm& a, int level, int u_power = 0) {
        return tensor(a, SimplexForm::constant(level, Scalar(1)), u_power);
    }
    static MixedForm from_simplex(int dim, const SimplexForm& b, int u_power = 0) {
        return tensor(ManifoldForm::constant(dim, Scalar(1)), b, u_power);
    }
    static MixedForm constant(int dim, int level, const Scalar& c) {
        return from_manifold(ManifoldForm::constant(dim, c), level);
    }

    int dim() const { return dim_; }
    int level() const { return level_; }
    const std::map<ManifoldKey, SimplexForm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const ManifoldKey& key, const SimplexForm& b) {
        if (b.is_zero()) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(key, b);
            return;
        }
        it->second += b;
        if (it->second.is_zero()) terms_.erase(it);
    }

    MixedForm& operator+=(const MixedForm& o) {
        adopt(o);
        for (const auto& [key, b] : o.terms_) add(key, b);
        return *this;
    }
    MixedForm& operator-=(const MixedForm& o) {
        adopt(o);
        for (const auto& [key, b] : o.terms_) add(key, -b);
        return *this;
    }
    MixedForm operator-() const { return scaled(Scalar(-1)); }
    friend MixedForm operator+(MixedForm a, const MixedForm& b) { return a += b; }
    friend MixedForm operator-(MixedForm a, const MixedForm& b) { return a -= b; }

    MixedForm scaled(const Scalar& s) const {
        MixedForm r(dim_, level_);
        if (s.is_zero()) return r;
        for (const auto& [key, b] : terms_) r.add(key, b.scaled(s));
        return r;
    }
    friend MixedForm operator*(const Scalar& s, const MixedForm& f) { return f.scaled(s); }

    MixedForm times_u(int shift) const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_) {
            ManifoldKey k2 = key;
            k2.u += shift;
            r.terms_.emplace(std::move(k2), b);
        }
        return r;
    }

    // (a (x) b)(a' (x) b') = (-1)^{|b||a'|} (a a') (x) (b b')
    friend MixedForm operator*(const MixedForm& x, const MixedForm& y) {
        MixedForm r(x.dim_ ? x.dim_ : y.dim_, x.level_);
        if (x.terms_.empty() || y.terms_.empty()) return r;
        // Split the simplex factors of x by degree once.
        for (const auto& [kx, bx] : x.terms_) {
            std::map<int, SimplexForm> by_degree;
            for (const auto& [sk, c] : bx.terms()) {
                auto [it, _] = by_degree.try_emplace(degree_of(sk.second), SimplexForm(bx.level()));
                it->second.add_term(sk.first, sk.second, c);
            }
            for (const auto& [ky, by] : y.terms_) {
                int sign = wedge_sign(kx.dx, ky.dx);
                if (sign == 0) continue;
                bool odd_y = degree_of(ky.dx) & 1;
                SimplexForm acc(x.level_);
                for (const auto& [deg, part] : by_degree) {
                    SimplexForm p = part * by;
                    if (odd_y && (deg & 1)) acc -= p;
                    else acc += p;
                }
                if (sign < 0) acc = -acc;
                r.add(ManifoldKey{kx.u + ky.u, lattice_add(kx.k, ky.k), kx.dx | ky.dx}, acc);
            }
        }
        return r;
    }

    // d on the manifold factor only: d(a ^ b) = da ^ b.
    MixedForm d_manifold() const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_)
            for (int j = 0; j < dim_; ++j) {
                int kj = key.k[static_cast<std::size_t>(j)];
                if (kj == 0 || (key.dx >> j & 1u)) continue;
                Scalar v(kj);
                if (insert_sign(key.dx, j) < 0) v = -v;
                r.add(ManifoldKey{key.u, key.k, key.dx | (Mask(1) << j)}, b.scaled(v));
            }
        return r;
    }

    // a ^ db without the Koszul sign.
    MixedForm d_simplex_plain() const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_) r.add(key, b.d());
        return r;
    }

    // (-1)^{|a|} a ^ db, the graded-derivation part of the total differential.
    MixedForm d_simplex() const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_) {
            SimplexForm db = b.d();
            r.add(key, (degree_of(key.dx) & 1) ? -db : db);
        }
        return r;
    }

    MixedForm d() const { return d_manifold() + d_simplex(); }

    MixedForm face(int i) const {
        MixedForm r(dim_, level_ - 1);
        for (const auto& [key, b] : terms_) r.add(key, b.face(i));
        return r;
    }

    MixedForm pullback(const TorusAction& act, const GroupElement& g) const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_) {
            ManifoldForm single = ManifoldForm::monomial(dim_, key.k, key.dx, Scalar(1));
            ManifoldForm moved = act.pullback(g, single);
            for (const auto& [mk, c] : moved.terms()) r.add(ManifoldKey{key.u, mk.first, mk.second}, b.scaled(c));
        }
        return r;
    }

    // Component of manifold degree a and simplex degree s.
    MixedForm bidegree_part(int a, int s) const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_)
            if (degree_of(key.dx) == a) r.add(key, b.part_of_degree(s));
        return r;
    }

    // Multiplies each term by u^{manifold degree + shift}.
    MixedForm rescale_by_manifold_degree(int shift) const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_) {
            ManifoldKey k2 = key;
            k2.u += degree_of(key.dx) + shift;
            r.add(k2, b);
        }
        return r;
    }

    MixedForm u_part(int power) const {
        MixedForm r(dim_, level_);
        for (const auto& [key, b] : terms_)
            if (key.u == power) r.add(key, b);
        return r;
    }

    // Fiber integral over Delta^k, returned as a level-0 mixed form.
    MixedForm integrate_simplex() const {
        MixedForm r(dim_, 0);
        for (const auto& [key, b] : terms_) {
            Scalar v = b.integrate();
            if (!v.is_zero()) r.add(key, SimplexForm::constant(0, v));
        }
        return r;
    }

    // Manifold component at u^power of a level-0 form.
    ManifoldForm manifold_part(int power = 0) const {
        ManifoldForm r(dim_);
        for (const auto& [key, b] : terms_) {
            if (key.u != power) continue;
            for (const auto& [sk, c] : b.terms())
                if (sk.second == 0 && std::all_of(sk.first.begin(), sk.first.end(), [](int e) { return e == 0; }))
                    r.add_term(key.k, key.dx, c);
        }
        return r;
    }

    // int_M int_{Delta^k} with the product orientation dx_1..dx_m dt_1..dt_k.
    UScalar integrate_total() const {
        UScalar r;
        const Mask top = (Mask(1) << dim_) - 1;
        for (const auto& [key, b] : terms_) {
            if (key.dx != top || !lattice_is_zero(key.k)) continue;
            Scalar v = b.integrate();
            if (!v.is_zero()) r.add_term(key.u, v);
        }
        return r;
    }

    int max_total_degree() const {
        int best = -1;
        for (const auto& [key, b] : terms_)
            for (const auto& [sk, c] : b.terms()) best = std::max(best, degree_of(key.dx) + degree_of(sk.second));
        return best;
    }

    friend bool operator==(const MixedForm& a, const MixedForm& b) { return a.terms_ == b.terms_; }
    friend std::ostream& operator<<(std::ostream& os, const MixedForm& f) { return os << f.str(); }
    friend bool operator!=(const MixedForm& a, const MixedForm& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [key, b] : terms_) {
            if (!first) os << " + ";
            os << "[";
            if (key.u) os << "u^" << key.u << " ";
            if (!lattice_is_zero(key.k)) os << "e" << lattice_str(key.k) << " ";
            if (key.dx) os << mask_str(key.dx, "dx") << " ";
            os << "(" << b.str() << ")]";
            first = false;
        }
        return os.str();
    }

private:
    void adopt(const MixedForm& o) {
        if (terms_.empty()) {
            if (dim_ == 0) dim_ = o.dim_;
            level_ = o.level_;
        }
    }

    int dim_ = 0;
    int level_ = 0;
    std::map<ManifoldKey, SimplexForm> terms_;
};

// A simplicial form given intensionally: tuple of length k -> form at level k.
class CompatibleForm {
public:
    using Evaluator = std::function<MixedForm(const GroupTuple&)>;

    CompatibleForm() = default;
    CompatibleForm(int dim, Evaluator eval, std::string name = "form")
        : dim_(dim), state_(std::make_shared<State>()) {
        state_->eval = std::move(eval);
        state_->name = std::move(name);
    }

    int dim() const { return dim_; }
    const std::string& name() const { return state_->name; }

    MixedForm operator()(const GroupTuple& t) const {
        {
            std::lock_guard lock(state_->mu);
            if (auto it = state_->cache.find(t); it != state_->cache.end()) return it->second;
        }
        MixedForm v = state_->eval(t);
        std::lock_guard lock(state_->mu);
        return state_->cache.emplace(t, std::move(v)).first->second;
    }

    template <class F>
    CompatibleForm map(F&& f, std::string name) const {
        CompatibleForm self = *this;
        return CompatibleForm(dim_, [self, f = std::forward<F>(f)](const GroupTuple& t) { return f(self(t), t); }, std::move(name));
    }

    friend CompatibleForm operator+(const CompatibleForm& a, const CompatibleForm& b) {
        return CompatibleForm(a.dim_, [a, b](const GroupTuple& t) { return a(t) + b(t); }, a.name() + "+" + b.name());
    }
    friend CompatibleForm operator-(const CompatibleForm& a, const CompatibleForm& b) {
        return CompatibleForm(a.dim_, [a, b](const GroupTuple& t) { return a(t) - b(t); }, a.name() + "-" + b.name());
    }
    friend CompatibleForm operator*(const CompatibleForm& a, const CompatibleForm& b) {
        return CompatibleForm(a.dim_, [a, b](const GroupTuple& t) { return a(t) * b(t); }, a.name() + "^" + b.name());
    }
    CompatibleForm scaled(const Scalar& s) const {
        return map([s](const MixedForm& f, const GroupTuple&) { return f.scaled(s); }, name());
    }
    CompatibleForm times_u(int shift) const {
        return map([shift](const MixedForm& f, const GroupTuple&) { return f.times_u(shift); }, name());
    }

private:
    struct State {
        Evaluator eval;
        std::string name;
        std::mutex mu;
        std::map<GroupTuple, MixedForm> cache;
    };
    int dim_ = 1;
    std::shared_ptr<State> state_;
};

// Sign convention for the simplex part of the rescaled differential.
enum class SimplexSign {
    plain,   // id (x) d
    koszul,  // (-1)^{m + s} id (x) d, so that the whole operator is +-(u d_x + d_t) with Koszul d_t
};

// u d~_dR + d_Delta on the rescaled complex: on u^j a (x) b with a of degree
// |a| and b of degree s, d~ = (-1)^{(m - |a|) + s} u da (x) b.
inline MixedForm rescaled_differential(const MixedForm& f, SimplexSign convention) {
    const int m = f.dim();
    MixedForm r(m, f.level());
    for (const auto& [key, b] : f.terms()) {
        std::map<int, SimplexForm> by_degree;
        for (const auto& [sk, c] : b.terms()) {
            auto [it, _] = by_degree.try_emplace(degree_of(sk.second), SimplexForm(b.level()));
            it->second.add_term(sk.first, sk.second, c);
        }
        const int a = degree_of(key.dx);
        for (const auto& [s, part] : by_degree) {
            MixedForm piece(m, f.level());
            piece.add(key, part);
            MixedForm dman = piece.d_manifold().times_u(1);
            if (((m - a + s) & 1) != 0) dman = -dman;
            MixedForm dsim = piece.d_simplex_plain();
            if (convention == SimplexSign::koszul && ((m + s) & 1) != 0) dsim = -dsim;
            r += dman;
            r += dsim;
        }
    }
    return r;
}

inline CompatibleForm rescaled_differential(const CompatibleForm& w, SimplexSign convention) {
    return w.map([convention](const MixedForm& f, const GroupTuple&) { return rescaled_differential(f, convention); },
                 "D(" + w.name() + ")");
}

// Sum of the bidegree (a, d - a) parts.
inline MixedForm total_degree_part(const MixedForm& f, int degree) {
    MixedForm r(f.dim(), f.level());
    for (int a = 0; a <= degree; ++a) r += f.bidegree_part(a, degree - a);
    return r;
}

// Twisted differential on the rescaled complex: on a part of total form degree d,
// -(-1)^d (u d_x + d_t - Theta_u ^ .) with the Koszul d_t.
inline MixedForm twisted_differential(const MixedForm& f, const MixedForm& theta_u) {
    MixedForm r(f.dim(), f.level());
    for (int d = 0; d <= f.dim() + f.level(); ++d) {
        const MixedForm part = total_degree_part(f, d);
        if (part.is_zero()) continue;
        MixedForm img = part.d_manifold().times_u(1) + part.d_simplex() - theta_u * part;
        r += (d % 2) ? img : -img;
    }
    return r;
}

inline CompatibleForm twisted_differential(const CompatibleForm& w, const CompatibleForm& theta_u) {
    return CompatibleForm(
        w.dim(), [w, theta_u](const GroupTuple& t) { return twisted_differential(w(t), theta_u(t)); }, "Dtw(" + w.name() + ")");
}

// Ordinary total differential d_x + (-1)^{|a|} d_t on each level.
inline CompatibleForm total_differential(const CompatibleForm& w) {
    return w.map([](const MixedForm& f, const GroupTuple&) { return f.d(); }, "d(" + w.name() + ")");
}

// I_Delta: integrate each level over its simplex.
inline MixedForm integrate_over_simplex(const CompatibleForm& w, const GroupTuple& t) { return w(t).integrate_simplex(); }

struct CompatibilityWitness {
    int level = 0;
    int face = 0;
    GroupTuple tuple;
    std::string detail;
};

struct CompatibilityReport {
    int checks = 0;
    std::optional<CompatibilityWitness> failure;
    bool passed() const { return !failure.has_value(); }
};

// Restriction of w_(k)(t) to face i equals w_(k-1) at the nerve face, with the
// face-0 value pulled back by g_1.
inline CompatibilityReport check_compatibility(const CompatibleForm& w, const TorusAction& act, int k_max,
                                               const std::vector<GroupTuple>& samples) {
    CompatibilityReport rep;
    const AbelianGroup& group = act.group();
    for (const auto& full : samples)
        for (int k = 1; k <= std::min<int>(k_max, static_cast<int>(full.size())); ++k) {
            GroupTuple t(full.begin(), full.begin() + k);
            MixedForm top = w(t);
            for (int i = 0; i <= k; ++i) {
                MixedForm lhs = top.face(i);
                MixedForm rhs = w(tuple_face(group, i, t));
                if (i == 0) rhs = rhs.pullback(act, t[0]);
                ++rep.checks;
                if (lhs != rhs) {
                    rep.failure = CompatibilityWitness{k, i, t, "restricted: " + lhs.str() + " expected: " + rhs.str()};
                    return rep;
                }
            }
        }
    return rep;
}

// Dupont-style Whitney form built from a group cochain c: Gamma^p -> Omega(M).
// On (g_1..g_n) it is sum over I = {i_0 < .. < i_p} of
// c(varpi_I g)^{g_1..g_{i_0}} ^ p! sum_j (-1)^j t_{i_j} dt_{i_0} .. (omit i_j) .. dt_{i_p}.
inline CompatibleForm whitney_form(const TorusAction& act, int p, std::function<ManifoldForm(const GroupTuple&)> cochain,
                                   std::string name = "whitney") {
    const int m = act.dim();
    return CompatibleForm(
        m,
        [act, p, cochain, m](const GroupTuple& t) {
            const int n = static_cast<int>(t.size());
            MixedForm out(m, n);
            if (p > n) return out;
            std::vector<SimplexForm> bary(static_cast<std::size_t>(n) + 1), dbary(static_cast<std::size_t>(n) + 1);
            bary[0] = SimplexForm::constant(n, Scalar(1));
            dbary[0] = SimplexForm(n);
            for (int i = 1; i <= n; ++i) {
                bary[static_cast<std::size_t>(i)] = SimplexForm::t(n, i);
                dbary[static_cast<std::size_t>(i)] = SimplexForm::dt(n, i);
                bary[0] -= bary[static_cast<std::size_t>(i)];
                dbary[0] -= dbary[static_cast<std::size_t>(i)];
            }
            std::vector<int> idx(static_cast<std::size_t>(p) + 1);
            std::function<void(int, int)> rec = [&](int pos, int start) {
                if (pos == p + 1) {
                    SimplexForm phi(n);
                    for (int j = 0; j <= p; ++j) {
                        SimplexForm term = bary[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
                        for (int l = 0; l <= p; ++l)
                            if (l != j) term = term * dbary[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])];
                        if (j % 2) phi -= term;
                        else phi += term;
                    }
                    phi = phi.scaled(Scalar(factorial(p)));
                    GroupTuple args = varpi(act.group(), n, idx, t);
                    ManifoldForm value = cochain(args);
                    value = act.pullback(act.group().product(t, 0, static_cast<std::size_t>(idx[0])), value);
                    out += MixedForm::from_manifold(value, n) * MixedForm::from_simplex(m, phi);
                    return;
                }
                for (int v = start; v <= n; ++v) {
                    idx[static_cast<std::size_t>(pos)] = v;
                    rec(pos + 1, v + 1);
                }
            };
            rec(0, 0);
            return out;
        },
        std::move(name));
}

}  // namespace gerbejlo

#endif
