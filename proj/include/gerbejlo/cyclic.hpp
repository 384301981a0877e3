#ifndef GERBEJLO_CYCLIC_HPP
#define GERBEJLO_CYCLIC_HPP

#include <concepts>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "exact.hpp"

namespace gerbejlo {

template <class A>
concept CyclicAlgebra = std::default_initializable<A> && requires(const A& a, const A& b, const Scalar& s) {
    { a * b } -> std::convertible_to<A>;
    { a + b } -> std::convertible_to<A>;
    { a.scaled(s) } -> std::convertible_to<A>;
};

// Element (a, lambda) of the unitization A + k.
template <class A>
struct Unitized {
    A element{};
    Scalar unit{};

    static Unitized unit_element(const Scalar& lambda = Scalar(1)) { return Unitized{A{}, lambda}; }
    static Unitized of(A a) { return Unitized{std::move(a), Scalar()}; }
};

// (a0, lambda) * a = a0 a + lambda a
template <CyclicAlgebra A>
Unitized<A> left_multiply(const Unitized<A>& x, const A& a) {
    A r = x.element * a;
    if (!x.unit.is_zero()) r = r + a.scaled(x.unit);
    return Unitized<A>::of(std::move(r));
}

// a * (a0, lambda) = a a0 + lambda a
template <CyclicAlgebra A>
Unitized<A> right_multiply(const A& a, const Unitized<A>& x) {
    A r = a * x.element;
    if (!x.unit.is_zero()) r = r + a.scaled(x.unit);
    return Unitized<A>::of(std::move(r));
}

// Normalized cochain on the unitization, evaluated on (a~_0, a_1, .., a_n) for
// every n at once; the ULaurent value carries the u-grading. Only the leading
// slot accepts the adjoined unit, so normalization holds by construction.
template <CyclicAlgebra A>
class CyclicCochain {
public:
    using Args = std::vector<A>;
    using Evaluator = std::function<UScalar(const Unitized<A>&, const Args&)>;

    CyclicCochain() : CyclicCochain([](const Unitized<A>&, const Args&) { return UScalar(); }, "0") {}
    CyclicCochain(Evaluator eval, std::string name = "c")
        : eval_(std::make_shared<Evaluator>(std::move(eval))), name_(std::move(name)) {}

    UScalar operator()(const Unitized<A>& a0, const Args& rest) const { return (*eval_)(a0, rest); }
    const std::string& name() const { return name_; }

    friend CyclicCochain operator+(const CyclicCochain& f, const CyclicCochain& g) {
        return CyclicCochain([f, g](const Unitized<A>& a0, const Args& r) { return f(a0, r) + g(a0, r); }, f.name_ + "+" + g.name_);
    }
    friend CyclicCochain operator-(const CyclicCochain& f, const CyclicCochain& g) {
        return CyclicCochain([f, g](const Unitized<A>& a0, const Args& r) { return f(a0, r) - g(a0, r); }, f.name_ + "-" + g.name_);
    }
    CyclicCochain scaled(const Scalar& s) const {
        CyclicCochain f = *this;
        return CyclicCochain([f, s](const Unitized<A>& a0, const Args& r) { return f(a0, r).scaled(s); }, name_);
    }
    CyclicCochain times_u(int shift) const {
        CyclicCochain f = *this;
        return CyclicCochain([f, shift](const Unitized<A>& a0, const Args& r) { return f(a0, r).times_u(shift); }, "u" + name_);
    }

private:
    std::shared_ptr<const Evaluator> eval_;
    std::string name_;
};

// (bf)(a~0, a1..a_{n+1}) = f(a~0 a1, ..) + sum_{i=1}^{n} (-1)^i f(.., a_i a_{i+1}, ..)
//                          + (-1)^{n+1} f(a_{n+1} a~0, a1..an)
template <CyclicAlgebra A>
CyclicCochain<A> hochschild_b(const CyclicCochain<A>& f) {
    using Args = typename CyclicCochain<A>::Args;
    return CyclicCochain<A>(
        [f](const Unitized<A>& a0, const Args& rest) {
            if (rest.empty()) return UScalar();
            const std::size_t n = rest.size() - 1;
            UScalar total = f(left_multiply(a0, rest[0]), Args(rest.begin() + 1, rest.end()));
            for (std::size_t i = 1; i <= n; ++i) {
                Args merged;
                merged.reserve(n);
                for (std::size_t j = 0; j < rest.size(); ++j) {
                    if (j == i - 1) {
                        merged.push_back(rest[j] * rest[j + 1]);
                        ++j;
                    } else {
                        merged.push_back(rest[j]);
                    }
                }
                UScalar v = f(a0, merged);
                total += (i % 2) ? -v : v;
            }
            UScalar last = f(right_multiply(rest[n], a0), Args(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n)));
            total += ((n + 1) % 2) ? -last : last;
            return total;
        },
        "b(" + f.name() + ")");
}

// (Bf)(a~0, a1..an) = sum_i (-1)^{ni} f(1, a_i, .., a_n, a_0, .., a_{i-1}); the
// unit part of a~0 contributes nothing.
template <CyclicAlgebra A>
CyclicCochain<A> connes_B(const CyclicCochain<A>& f) {
    using Args = typename CyclicCochain<A>::Args;
    return CyclicCochain<A>(
        [f](const Unitized<A>& a0, const Args& rest) {
            const std::size_t n = rest.size();
            Args all;
            all.reserve(n + 1);
            all.push_back(a0.element);
            all.insert(all.end(), rest.begin(), rest.end());
            const auto one = Unitized<A>::unit_element();
            UScalar total;
            for (std::size_t i = 0; i <= n; ++i) {
                Args rotated;
                rotated.reserve(n + 1);
                for (std::size_t j = 0; j <= n; ++j) rotated.push_back(all[(i + j) % (n + 1)]);
                UScalar v = f(one, rotated);
                total += ((n * i) % 2) ? -v : v;
            }
            return total;
        },
        "B(" + f.name() + ")");
}

template <CyclicAlgebra A>
CyclicCochain<A> b_plus_uB(const CyclicCochain<A>& f) {
    return hochschild_b(f) + connes_B(f).times_u(1);
}

}  // namespace gerbejlo

#endif
