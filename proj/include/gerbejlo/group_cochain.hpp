#ifndef GERBEJLO_GROUP_COCHAIN_HPP
#define GERBEJLO_GROUP_COCHAIN_HPP

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cyclic.hpp"
#include "simplicial.hpp"

namespace gerbejlo {

// Gamma acting on an algebra, plus the decomposition of a leading argument into
// pieces with a definite first E-index (used by gamma and the homotopy h).
template <CyclicAlgebra A>
struct GroupModule {
    using Piece = std::pair<GroupElement, Unitized<A>>;
    AbelianGroup group;
    std::function<A(const GroupElement&, const A&)> act;
    std::function<std::vector<Piece>(const Unitized<A>&)> split_leading;

    Unitized<A> act_unitized(const GroupElement& g, const Unitized<A>& x) const { return Unitized<A>{act(g, x.element), x.unit}; }
};

template <class A>
concept Encodable = requires(std::string& out, const A& a) { encode(out, a); };

inline void encode(std::string& out, const GroupTuple& t) {
    out.push_back(static_cast<char>(t.size()));
    for (const auto& g : t) encode(out, g);
}

template <Encodable A>
std::string evaluation_key(const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& rest) {
    std::string key;
    key.reserve(256);
    encode(key, t);
    encode(key, a0.unit);
    encode(key, a0.element);
    for (const auto& a : rest) encode(key, a);
    return key;
}

// Thread-safe cache of cochain values keyed by encoded arguments.
class EvaluationMemo {
public:
    std::optional<UScalar> find(const std::string& k) const {
        std::lock_guard lock(mu_);
        if (auto it = values_.find(k); it != values_.end()) return it->second;
        return std::nullopt;
    }
    const UScalar& insert(std::string k, UScalar v) {
        std::lock_guard lock(mu_);
        return values_.emplace(std::move(k), std::move(v)).first->second;
    }
    std::size_t size() const {
        std::lock_guard lock(mu_);
        return values_.size();
    }

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, UScalar> values_;
};

enum class CochainFlavor { inhomogeneous, homogeneous };

// Gamma-cochain with values in cyclic cochains, defined for every tuple length:
// inhomogeneous cochains of degree k take k group elements, homogeneous ones k+1.
template <CyclicAlgebra A>
class GroupCochain {
public:
    using Args = std::vector<A>;
    using Evaluator = std::function<UScalar(const GroupTuple&, const Unitized<A>&, const Args&)>;

    GroupCochain() = default;
    GroupCochain(CochainFlavor flavor, Evaluator eval, std::string name = "f")
        : flavor_(flavor), eval_(std::make_shared<Evaluator>(std::move(eval))), name_(std::move(name)) {}

    CochainFlavor flavor() const { return flavor_; }
    const std::string& name() const { return name_; }

    UScalar operator()(const GroupTuple& t, const Unitized<A>& a0, const Args& rest) const { return (*eval_)(t, a0, rest); }

    CyclicCochain<A> at(const GroupTuple& t) const {
        GroupCochain self = *this;
        return CyclicCochain<A>([self, t](const Unitized<A>& a0, const Args& r) { return self(t, a0, r); },
                                name_ + tuple_str(t));
    }

    // Group degree of a tuple under this flavor.
    int degree_of(const GroupTuple& t) const {
        return static_cast<int>(t.size()) - (flavor_ == CochainFlavor::homogeneous ? 1 : 0);
    }

    friend GroupCochain operator+(const GroupCochain& f, const GroupCochain& g) {
        check_flavor(f, g);
        return GroupCochain(
            f.flavor_, [f, g](const GroupTuple& t, const Unitized<A>& a0, const Args& r) { return f(t, a0, r) + g(t, a0, r); },
            f.name_ + "+" + g.name_);
    }
    friend GroupCochain operator-(const GroupCochain& f, const GroupCochain& g) {
        check_flavor(f, g);
        return GroupCochain(
            f.flavor_, [f, g](const GroupTuple& t, const Unitized<A>& a0, const Args& r) { return f(t, a0, r) - g(t, a0, r); },
            f.name_ + "-" + g.name_);
    }
    GroupCochain scaled(const Scalar& s) const {
        GroupCochain f = *this;
        return GroupCochain(
            flavor_, [f, s](const GroupTuple& t, const Unitized<A>& a0, const Args& r) { return f(t, a0, r).scaled(s); }, name_);
    }

    // Apply a cyclic operator tuple by tuple.
    GroupCochain pointwise(std::function<CyclicCochain<A>(const CyclicCochain<A>&)> op, std::string name) const {
        GroupCochain f = *this;
        return GroupCochain(
            flavor_, [f, op](const GroupTuple& t, const Unitized<A>& a0, const Args& r) { return op(f.at(t))(a0, r); },
            std::move(name));
    }

    // Cache values keyed by the arguments themselves.
    GroupCochain memoized() const
        requires Encodable<A>
    {
        GroupCochain f = *this;
        auto cache = std::make_shared<EvaluationMemo>();
        return GroupCochain(
            flavor_,
            [f, cache](const GroupTuple& t, const Unitized<A>& a0, const Args& r) {
                std::string key = evaluation_key(t, a0, r);
                if (auto hit = cache->find(key)) return *hit;
                return cache->insert(std::move(key), f(t, a0, r));
            },
            name_);
    }

    // Keep only the values on tuples of a given group degree.
    GroupCochain restricted_to_degree(int k) const {
        GroupCochain f = *this;
        return GroupCochain(
            flavor_,
            [f, k](const GroupTuple& t, const Unitized<A>& a0, const Args& r) {
                return f.degree_of(t) == k ? f(t, a0, r) : UScalar();
            },
            name_ + "|" + std::to_string(k));
    }

private:
    static void check_flavor(const GroupCochain& f, const GroupCochain& g) {
        if (f.flavor_ != g.flavor_) throw std::invalid_argument("mixing homogeneous and inhomogeneous cochains");
    }

    CochainFlavor flavor_ = CochainFlavor::inhomogeneous;
    std::shared_ptr<const Evaluator> eval_;
    std::string name_;
};

// (g . c)(a) = c(g^-1 . a)
template <CyclicAlgebra A>
UScalar act_and_evaluate(const GroupModule<A>& mod, const GroupElement& g, const CyclicCochain<A>& c, const Unitized<A>& a0,
                         const std::vector<A>& rest) {
    const GroupElement gi = mod.group.inv(g);
    std::vector<A> moved;
    moved.reserve(rest.size());
    for (const auto& a : rest) moved.push_back(mod.act(gi, a));
    return c(mod.act_unitized(gi, a0), moved);
}

template <CyclicAlgebra A>
CyclicCochain<A> act_on_cochain(const GroupModule<A>& mod, const GroupElement& g, const CyclicCochain<A>& c) {
    return CyclicCochain<A>([mod, g, c](const Unitized<A>& a0, const std::vector<A>& r) { return act_and_evaluate(mod, g, c, a0, r); },
                            g.str() + "." + c.name());
}

// Inhomogeneous coboundary with single signs:
// (delta f)(g1..g_{k+1}) = g1.f(g2..) + sum_{i=1}^{k} (-1)^i f(.., g_i g_{i+1}, ..) + (-1)^{k+1} f(g1..gk)
template <CyclicAlgebra A>
GroupCochain<A> group_delta(const GroupModule<A>& mod, const GroupCochain<A>& f) {
    if (f.flavor() != CochainFlavor::inhomogeneous) throw std::invalid_argument("group_delta expects an inhomogeneous cochain");
    return GroupCochain<A>(
        CochainFlavor::inhomogeneous,
        [mod, f](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            if (t.empty()) return UScalar();
            const std::size_t k = t.size() - 1;
            UScalar total = act_and_evaluate(mod, t[0], f.at(GroupTuple(t.begin() + 1, t.end())), a0, r);
            for (std::size_t i = 1; i <= k; ++i) {
                UScalar v = f(tuple_face(mod.group, static_cast<int>(i), t), a0, r);
                total += (i % 2) ? -v : v;
            }
            UScalar last = f(GroupTuple(t.begin(), t.end() - 1), a0, r);
            total += ((k + 1) % 2) ? -last : last;
            return total;
        },
        "dG(" + f.name() + ")");
}

// (-1)^n delta, n the cyclic degree of the argument list.
template <CyclicAlgebra A>
GroupCochain<A> cyclic_degree_sign(const GroupCochain<A>& f) {
    return GroupCochain<A>(
        f.flavor(),
        [f](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            UScalar v = f(t, a0, r);
            return (r.size() % 2) ? -v : v;
        },
        "s(" + f.name() + ")");
}

template <CyclicAlgebra A>
GroupCochain<A> group_delta_prime(const GroupModule<A>& mod, const GroupCochain<A>& f) {
    return cyclic_degree_sign(group_delta(mod, f));
}

// (delta~ f)(g0..gn) = sum_i (-1)^i f(.., ^g_i, ..)
template <CyclicAlgebra A>
GroupCochain<A> homogeneous_delta(const GroupCochain<A>& f) {
    if (f.flavor() != CochainFlavor::homogeneous) throw std::invalid_argument("homogeneous_delta expects a homogeneous cochain");
    return GroupCochain<A>(
        CochainFlavor::homogeneous,
        [f](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            UScalar total;
            for (std::size_t i = 0; i < t.size(); ++i) {
                GroupTuple s = t;
                s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
                UScalar v = f(s, a0, r);
                total += (i % 2) ? -v : v;
            }
            return total;
        },
        "dH(" + f.name() + ")");
}

// Psi_0(c)(g0..gn) = g0 . c(g0^-1 g1, g1^-1 g2, .., g_{n-1}^-1 g_n)
template <CyclicAlgebra A>
GroupCochain<A> psi0(const GroupModule<A>& mod, const GroupCochain<A>& c) {
    if (c.flavor() != CochainFlavor::inhomogeneous) throw std::invalid_argument("psi0 expects an inhomogeneous cochain");
    return GroupCochain<A>(
        CochainFlavor::homogeneous,
        [mod, c](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            if (t.empty()) return UScalar();
            GroupTuple steps;
            for (std::size_t i = 1; i < t.size(); ++i) steps.push_back(mod.group.mul(mod.group.inv(t[i - 1]), t[i]));
            return act_and_evaluate(mod, t[0], c.at(steps), a0, r);
        },
        "Psi0(" + c.name() + ")");
}

// Inverse of psi0: c(g1..gn) = f(1, g1, g1 g2, .., g1..gn).
template <CyclicAlgebra A>
GroupCochain<A> psi0_inverse(const GroupModule<A>& mod, const GroupCochain<A>& f) {
    if (f.flavor() != CochainFlavor::homogeneous) throw std::invalid_argument("psi0_inverse expects a homogeneous cochain");
    return GroupCochain<A>(
        CochainFlavor::inhomogeneous,
        [mod, f](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            GroupTuple h{mod.group.identity()};
            for (const auto& g : t) h.push_back(mod.group.mul(h.back(), g));
            return f(h, a0, r);
        },
        "Psi0^-1(" + f.name() + ")");
}

// (h phi)(g0..gk)(s) = (-1)^{k+1} sum over pieces s_j of s with first index gamma_j
// of phi(g0..gk, gamma_j)(s_j).
template <CyclicAlgebra A>
GroupCochain<A> homotopy_h(const GroupModule<A>& mod, const GroupCochain<A>& phi) {
    if (phi.flavor() != CochainFlavor::homogeneous) throw std::invalid_argument("homotopy_h expects a homogeneous cochain");
    if (!mod.split_leading) throw std::invalid_argument("module has no E-component decomposition");
    return GroupCochain<A>(
        CochainFlavor::homogeneous,
        [mod, phi](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            if (t.empty()) return UScalar();
            UScalar total;
            for (const auto& [gamma, piece] : mod.split_leading(a0)) {
                GroupTuple ext = t;
                ext.push_back(gamma);
                total += phi(ext, piece, r);
            }
            return (t.size() % 2) ? -total : total;
        },
        "h(" + phi.name() + ")");
}

// Evaluation of a homogeneous degree-0 cochain at the points gamma(s); on
// degree 0, delta~ h + h delta~ = 1 - augmentation.
template <CyclicAlgebra A>
GroupCochain<A> augmentation(const GroupModule<A>& mod, const GroupCochain<A>& phi) {
    return GroupCochain<A>(
        CochainFlavor::homogeneous,
        [mod, phi](const GroupTuple& t, const Unitized<A>& a0, const std::vector<A>& r) {
            if (t.size() != 1) return UScalar();
            UScalar total;
            for (const auto& [gamma, piece] : mod.split_leading(a0)) total += phi(GroupTuple{gamma}, piece, r);
            return total;
        },
        "eps(" + phi.name() + ")");
}

}  // namespace gerbejlo

#endif
