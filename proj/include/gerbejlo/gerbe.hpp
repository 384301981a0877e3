#ifndef GERBEJLO_GERBE_HPP
#define GERBEJLO_GERBE_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "group_cochain.hpp"
#include "mixed.hpp"

namespace gerbejlo {

// Invertible monomial c * e_k.
struct UnitFunction {
    Scalar coefficient{1};
    Lattice mode;

    static UnitFunction one(int dim) { return UnitFunction{Scalar(1), Lattice(static_cast<std::size_t>(dim), 0)}; }

    static UnitFunction from_form(const ManifoldForm& f) {
        if (f.terms().size() != 1) throw ScenarioError("unit must be a single monomial c*e(k), got " + f.str());
        const auto& [key, c] = *f.terms().begin();
        if (key.second != 0) throw ScenarioError("unit must be a function, got " + f.str());
        return UnitFunction{c, key.first};
    }

    int dim() const { return static_cast<int>(mode.size()); }
    ManifoldForm as_form() const { return ManifoldForm::monomial(dim(), mode, 0, coefficient); }

    // dlog(c e_k) = sum_j k_j dx_j
    ManifoldForm dlog() const {
        ManifoldForm r(dim());
        for (int j = 0; j < dim(); ++j)
            if (mode[static_cast<std::size_t>(j)] != 0)
                r.add_term(Lattice(mode.size(), 0), Mask(1) << j, Scalar(static_cast<long>(mode[static_cast<std::size_t>(j)])));
        return r;
    }

    UnitFunction inverse() const {
        Lattice k = mode;
        for (auto& x : k) x = -x;
        return UnitFunction{coefficient.inverse(), std::move(k)};
    }
    friend UnitFunction operator*(const UnitFunction& a, const UnitFunction& b) {
        return UnitFunction{a.coefficient * b.coefficient, lattice_add(a.mode, b.mode)};
    }
    friend bool operator==(const UnitFunction& a, const UnitFunction& b) { return a.coefficient == b.coefficient && a.mode == b.mode; }

    std::string str() const { return "(" + coefficient.str() + ")*e" + lattice_str(mode); }
};

// Finitely supported matrix (p, q) -> entry; entry (p, q) is the E_{p,q}
// component. The product is (X Y)(p, r) = sum_q X(p, q) ^ Y(q, r).
template <class Entry>
class EndSection {
public:
    using Index = std::pair<GroupElement, GroupElement>;

    EndSection() = default;

    static EndSection elementary(const GroupElement& p, const GroupElement& q, Entry value) {
        EndSection e;
        e.add(p, q, std::move(value));
        return e;
    }

    const std::map<Index, Entry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    void add(const GroupElement& p, const GroupElement& q, const Entry& value) {
        if (value.is_zero()) return;
        auto [it, inserted] = entries_.try_emplace(Index{p, q}, value);
        if (!inserted) {
            it->second += value;
            if (it->second.is_zero()) entries_.erase(it);
        }
    }

    std::optional<Entry> get(const GroupElement& p, const GroupElement& q) const {
        auto it = entries_.find(Index{p, q});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::set<GroupElement> rows() const {
        std::set<GroupElement> r;
        for (const auto& [idx, v] : entries_) r.insert(idx.first);
        return r;
    }

    EndSection row(const GroupElement& p) const {
        EndSection r;
        for (auto it = entries_.lower_bound(Index{p, GroupElement{}}); it != entries_.end() && it->first.first == p; ++it)
            r.entries_.insert(*it);
        return r;
    }

    EndSection& operator+=(const EndSection& o) {
        for (const auto& [idx, v] : o.entries_) add(idx.first, idx.second, v);
        return *this;
    }
    EndSection& operator-=(const EndSection& o) {
        for (const auto& [idx, v] : o.entries_) add(idx.first, idx.second, -v);
        return *this;
    }
    friend EndSection operator+(EndSection a, const EndSection& b) { return a += b; }
    friend EndSection operator-(EndSection a, const EndSection& b) { return a -= b; }
    EndSection operator-() const { return scaled(Scalar(-1)); }

    EndSection scaled(const Scalar& s) const {
        EndSection r;
        for (const auto& [idx, v] : entries_) r.add(idx.first, idx.second, v.scaled(s));
        return r;
    }

    friend EndSection operator*(const EndSection& x, const EndSection& y) {
        std::map<GroupElement, std::vector<std::pair<GroupElement, const Entry*>>> by_row;
        for (const auto& [idx, v] : y.entries_) by_row[idx.first].emplace_back(idx.second, &v);
        EndSection r;
        for (const auto& [idx, v] : x.entries_) {
            auto it = by_row.find(idx.second);
            if (it == by_row.end()) continue;
            for (const auto& [col, w] : it->second) r.add(idx.first, col, v * *w);
        }
        return r;
    }

    template <class F>
    auto map(F&& f) const {
        using Out = decltype(f(std::declval<const Entry&>(), std::declval<const GroupElement&>(), std::declval<const GroupElement&>()));
        EndSection<Out> r;
        for (const auto& [idx, v] : entries_) r.add(idx.first, idx.second, f(v, idx.first, idx.second));
        return r;
    }

    // Sum of diagonal entries, starting from the given zero.
    Entry trace(Entry zero) const {
        for (const auto& [idx, v] : entries_)
            if (idx.first == idx.second) zero += v;
        return zero;
    }

    friend bool operator==(const EndSection& a, const EndSection& b) { return a.entries_ == b.entries_; }

    friend void encode(std::string& out, const EndSection& a) {
        encode(out, static_cast<long long>(a.entries_.size()));
        for (const auto& [idx, f] : a.entries_) {
            encode(out, idx.first);
            encode(out, idx.second);
            encode(out, f);
        }
    }
    friend bool operator!=(const EndSection& a, const EndSection& b) { return !(a == b); }

    std::string str() const {
        if (entries_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [idx, v] : entries_) {
            if (!first) os << " + ";
            os << "E[" << idx.first.str() << "," << idx.second.str() << "](" << v.str() << ")";
            first = false;
        }
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const EndSection& e) { return os << e.str(); }

private:
    std::map<Index, Entry> entries_;
};

// Elements of C_c(M, End E): function-valued matrices.
using EndAlgebra = EndSection<ManifoldForm>;
// Form-valued matrices over M x Delta^k.
using EndForm = EndSection<MixedForm>;

class GerbeScenario;

// Section of the twisted convolution algebra: finitely supported g -> function
// on M, bound to the scenario that supplies the product.
class LSection {
public:
    LSection() = default;
    explicit LSection(std::shared_ptr<const GerbeScenario> scenario) : scenario_(std::move(scenario)) {}

    static LSection single(std::shared_ptr<const GerbeScenario> scenario, const GroupElement& g, const ManifoldForm& f) {
        LSection s(std::move(scenario));
        s.add(g, f);
        return s;
    }

    const std::map<GroupElement, ManifoldForm>& values() const { return values_; }
    const std::shared_ptr<const GerbeScenario>& scenario() const { return scenario_; }
    bool is_zero() const { return values_.empty(); }

    void add(const GroupElement& g, const ManifoldForm& f) {
        if (f.is_zero()) return;
        auto [it, inserted] = values_.try_emplace(g, f);
        if (!inserted) {
            it->second += f;
            if (it->second.is_zero()) values_.erase(it);
        }
    }

    ManifoldForm at(const GroupElement& g, int dim) const {
        auto it = values_.find(g);
        return it == values_.end() ? ManifoldForm(dim) : it->second;
    }

    friend LSection operator+(LSection a, const LSection& b) {
        if (!a.scenario_) a.scenario_ = b.scenario_;
        for (const auto& [g, f] : b.values_) a.add(g, f);
        return a;
    }
    LSection scaled(const Scalar& s) const {
        LSection r(scenario_);
        for (const auto& [g, f] : values_) r.add(g, f.scaled(s));
        return r;
    }
    friend LSection operator*(const LSection& a, const LSection& b);

    friend bool operator==(const LSection& a, const LSection& b) { return a.values_ == b.values_; }

    friend void encode(std::string& out, const LSection& a) {
        encode(out, static_cast<long long>(a.values_.size()));
        for (const auto& [g, f] : a.values_) {
            encode(out, g);
            encode(out, f);
        }
    }

    std::string str() const {
        if (values_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [g, f] : values_) {
            if (!first) os << " + ";
            os << "[" << g.str() << "](" << f.str() << ")";
            first = false;
        }
        return os.str();
    }

private:
    std::shared_ptr<const GerbeScenario> scenario_;
    std::map<GroupElement, ManifoldForm> values_;
};

// Gerbe with connection on the translation groupoid of a torus, fully
// trivialized: connection 1-forms omega_g and the multiplication cocycle mu.
class GerbeScenario {
public:
    using OmegaRule = std::function<ManifoldForm(const GroupElement&)>;
    using MuRule = std::function<UnitFunction(const GroupElement&, const GroupElement&)>;

    GerbeScenario(TorusAction action, OmegaRule omega, MuRule mu)
        : action_(std::move(action)), state_(std::make_shared<State>()) {
        state_->omega = std::move(omega);
        state_->mu = std::move(mu);
    }

    const TorusAction& action() const { return action_; }
    const AbelianGroup& group() const { return action_.group(); }
    int dim() const { return action_.dim(); }

    ManifoldForm omega(const GroupElement& g) const {
        {
            std::lock_guard lock(state_->mutex);
            if (auto it = state_->omega_cache.find(g); it != state_->omega_cache.end()) return it->second;
        }
        ManifoldForm w = state_->omega(g);
        if (w.dim() != dim() && !w.is_zero()) throw ScenarioError("connection form has wrong dimension");
        if (!w.is_zero() && w.degree() != 1) throw ScenarioError("connection form at " + g.str() + " is not a 1-form: " + w.str());
        std::lock_guard lock(state_->mutex);
        return state_->omega_cache.emplace(g, w).first->second;
    }

    UnitFunction mu(const GroupElement& g, const GroupElement& h) const {
        std::pair key{g, h};
        {
            std::lock_guard lock(state_->mutex);
            if (auto it = state_->mu_cache.find(key); it != state_->mu_cache.end()) return it->second;
        }
        UnitFunction u = state_->mu(g, h);
        if (u.coefficient.is_zero()) throw ScenarioError("mu vanishes at " + g.str() + "," + h.str());
        std::lock_guard lock(state_->mutex);
        return state_->mu_cache.emplace(key, u).first->second;
    }

    ManifoldForm pull(const GroupElement& g, const ManifoldForm& f) const { return action_.pullback(g, f); }
    UnitFunction pull(const GroupElement& g, const UnitFunction& u) const { return UnitFunction::from_form(pull(g, u.as_form())); }

    // alpha(g, h) = omega_g + omega_h^g - omega_gh + dlog mu(g, h)
    ManifoldForm alpha(const GroupElement& g, const GroupElement& h) const {
        return omega(g) + pull(g, omega(h)) - omega(group().mul(g, h)) + mu(g, h).dlog();
    }

    ManifoldForm theta(const GroupElement& g) const { return omega(g).d(); }

    // Diagonal entry p of A(g): -alpha(g, g^-1 p).
    ManifoldForm discrepancy_A(const GroupElement& g, const GroupElement& p) const {
        return -alpha(g, group().mul(group().inv(g), p));
    }

    // mu(g, q) / mu(g, p) as a function.
    ManifoldForm transport(const GroupElement& g, const GroupElement& p, const GroupElement& q) const {
        return (mu(g, q) * mu(g, p).inverse()).as_form();
    }

    // g . E_{p,q}(f) = E_{gp, gq}(mu(g,q)/mu(g,p) f^g)
    EndAlgebra act(const GroupElement& g, const EndAlgebra& e) const {
        EndAlgebra r;
        for (const auto& [idx, f] : e.entries())
            r.add(group().mul(g, idx.first), group().mul(g, idx.second), transport(g, idx.first, idx.second) * pull(g, f));
        return r;
    }
    EndForm act(const GroupElement& g, const EndForm& e) const {
        EndForm r;
        for (const auto& [idx, f] : e.entries()) {
            MixedForm unit = MixedForm::from_manifold(transport(g, idx.first, idx.second), f.level());
            r.add(group().mul(g, idx.first), group().mul(g, idx.second), unit * f.pullback(action_, g));
        }
        return r;
    }

    // (f1 * f2)(g) = sum_{g1 g2 = g} mu(g1, g2) f1(g1) f2(g2)^{g1}
    LSection convolve(const LSection& a, const LSection& b) const {
        LSection r(a.scenario() ? a.scenario() : b.scenario());
        for (const auto& [g1, f1] : a.values())
            for (const auto& [g2, f2] : b.values()) r.add(group().mul(g1, g2), mu(g1, g2).as_form() * f1 * pull(g1, f2));
        return r;
    }

    // E_{1,g}(a) embedding of a section supported at g.
    EndAlgebra embed(const GroupElement& g, const ManifoldForm& f) const { return EndAlgebra::elementary(group().identity(), g, f); }

    // A copy whose cocycle is multiplied by factor at the single pair (g, h).
    GerbeScenario with_corrupted_mu(const GroupElement& g, const GroupElement& h, UnitFunction factor) const {
        GerbeScenario base = *this;
        MuRule rule = [base, g, h, factor](const GroupElement& x, const GroupElement& y) {
            UnitFunction v = base.mu(x, y);
            return (x == g && y == h) ? v * factor : v;
        };
        OmegaRule om = [base](const GroupElement& x) { return base.omega(x); };
        return GerbeScenario(action_, std::move(om), std::move(rule));
    }

    // Gamma acting on C_c(M, End E) with the E-index decomposition used by gamma.
    GroupModule<EndAlgebra> end_module() const {
        GerbeScenario self = *this;
        GroupModule<EndAlgebra> mod;
        mod.group = group();
        mod.act = [self](const GroupElement& g, const EndAlgebra& e) { return self.act(g, e); };
        mod.split_leading = [self](const Unitized<EndAlgebra>& x) { return self.split_by_row(x); };
        return mod;
    }

    // Rows of a0 plus, for finite Gamma, the unit written as sum_g E_{g,g}(lambda).
    std::vector<GroupModule<EndAlgebra>::Piece> split_by_row(const Unitized<EndAlgebra>& x) const {
        std::vector<GroupModule<EndAlgebra>::Piece> out;
        for (const auto& p : x.element.rows()) out.emplace_back(p, Unitized<EndAlgebra>::of(x.element.row(p)));
        if (!x.unit.is_zero()) {
            if (!group().is_finite())
                throw std::domain_error("the adjoined unit has no finite E-component decomposition over an infinite group");
            for (const auto& g : group().window(0))
                out.emplace_back(g, Unitized<EndAlgebra>::of(EndAlgebra::elementary(g, g, ManifoldForm::constant(dim(), x.unit))));
        }
        return out;
    }

    GroupModule<LSection> convolution_module() const;

private:
    struct State {
        OmegaRule omega;
        MuRule mu;
        std::mutex mutex;
        std::map<GroupElement, ManifoldForm> omega_cache;
        std::map<std::pair<GroupElement, GroupElement>, UnitFunction> mu_cache;
    };
    TorusAction action_;
    std::shared_ptr<State> state_;
};

inline LSection operator*(const LSection& a, const LSection& b) {
    const auto& s = a.scenario() ? a.scenario() : b.scenario();
    if (!s) return LSection();
    return s->convolve(a, b);
}

// gamma(E_{g0,g1}(a0) (x) E_{g1,g2}(a1) (x) ..) = g0 on elementary tensors.
inline GroupElement gamma(const std::vector<EndAlgebra>& tensor) {
    if (tensor.empty()) throw std::invalid_argument("gamma of an empty tensor");
    for (const auto& e : tensor)
        if (e.entries().size() != 1) throw std::invalid_argument("gamma is defined on elementary tensors only");
    return tensor.front().entries().begin()->first.first;
}

// Identity checks on a scenario; each returns a description of the first
// violation, or nothing.
struct IdentityFailure {
    std::string check;
    std::string witness;
};

inline std::optional<IdentityFailure> check_mu_cocycle(const GerbeScenario& s, const std::vector<GroupElement>& elems) {
    const auto& G = s.group();
    for (const auto& g : elems)
        for (const auto& h : elems)
            for (const auto& k : elems) {
                UnitFunction lhs = s.mu(g, h) * s.mu(G.mul(g, h), k);
                UnitFunction rhs = s.mu(g, G.mul(h, k)) * s.pull(g, s.mu(h, k));
                if (!(lhs == rhs))
                    return IdentityFailure{"mu-cocycle", "(g,h,k)=(" + g.str() + "," + h.str() + "," + k.str() + "): " + lhs.str() +
                                                             " vs " + rhs.str()};
            }
    return std::nullopt;
}

inline std::optional<IdentityFailure> check_normalization(const GerbeScenario& s, const std::vector<GroupElement>& elems) {
    const auto e = s.group().identity();
    if (!s.omega(e).is_zero()) return IdentityFailure{"normalization", "omega(1) = " + s.omega(e).str()};
    const auto one = UnitFunction::one(s.dim());
    for (const auto& g : elems)
        if (!(s.mu(e, g) == one) || !(s.mu(g, e) == one)) return IdentityFailure{"normalization", "mu(1,g) or mu(g,1) at g=" + g.str()};
    return std::nullopt;
}

inline std::optional<IdentityFailure> check_curvature_identity(const GerbeScenario& s, const std::vector<GroupElement>& elems) {
    const auto& G = s.group();
    for (const auto& g : elems)
        for (const auto& h : elems) {
            ManifoldForm lhs = s.theta(g) + s.pull(g, s.theta(h)) - s.theta(G.mul(g, h));
            ManifoldForm rhs = s.alpha(g, h).d();
            if (lhs != rhs) return IdentityFailure{"theta-alpha", "(g,h)=(" + g.str() + "," + h.str() + ")"};
        }
    return std::nullopt;
}

// A(g) + g.A(h) - A(gh) = -alpha(g, h) on each listed diagonal entry p.
inline std::optional<IdentityFailure> check_discrepancy_identity(const GerbeScenario& s, const std::vector<GroupElement>& elems,
                                                                 const std::vector<GroupElement>& entries) {
    const auto& G = s.group();
    for (const auto& g : elems)
        for (const auto& h : elems)
            for (const auto& p : entries) {
                ManifoldForm moved = s.pull(g, s.discrepancy_A(h, G.mul(G.inv(g), p)));
                ManifoldForm lhs = s.discrepancy_A(g, p) + moved - s.discrepancy_A(G.mul(g, h), p);
                if (lhs != -s.alpha(g, h))
                    return IdentityFailure{"discrepancy", "(g,h,p)=(" + g.str() + "," + h.str() + "," + p.str() + ")"};
            }
    return std::nullopt;
}

// alpha(h, x)^g - alpha(gh, x) + alpha(g, hx) - alpha(g, h) = 0
inline std::optional<IdentityFailure> check_alpha_cocycle(const GerbeScenario& s, const std::vector<GroupElement>& elems) {
    const auto& G = s.group();
    for (const auto& g : elems)
        for (const auto& h : elems)
            for (const auto& x : elems) {
                ManifoldForm v = s.pull(g, s.alpha(h, x)) - s.alpha(G.mul(g, h), x) + s.alpha(g, G.mul(h, x)) - s.alpha(g, h);
                if (!v.is_zero()) return IdentityFailure{"alpha-cocycle", "(" + g.str() + "," + h.str() + "," + x.str() + ")"};
            }
    return std::nullopt;
}

inline std::optional<IdentityFailure> check_associativity(const LSection& a, const LSection& b, const LSection& c) {
    LSection lhs = (a * b) * c, rhs = a * (b * c);
    if (!(lhs == rhs)) return IdentityFailure{"convolution-associativity", "a=" + a.str() + " b=" + b.str() + " c=" + c.str()};
    return std::nullopt;
}

inline GroupModule<LSection> GerbeScenario::convolution_module() const {
    GroupModule<LSection> mod;
    mod.group = group();
    mod.act = [](const GroupElement&, const LSection& a) { return a; };
    return mod;
}

}  // namespace gerbejlo

#endif
