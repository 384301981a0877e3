#ifndef GERBEJLO_SIMPLEX_HPP
#define GERBEJLO_SIMPLEX_HPP

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exact.hpp"
#include "torus.hpp"

namespace gerbejlo {

using Exponents = std::vector<int>;

// Polynomial forms on the standard k-simplex in Cartesian coordinates t_1..t_k
// (t_0 = 1 - sum t_i eliminated). Terms c * t^e dt_T.
class SimplexForm {
public:
    using Key = std::pair<Exponents, Mask>;

    SimplexForm() = default;
    explicit SimplexForm(int level) : level_(level) {
        if (level < 0) throw std::invalid_argument("negative simplex level");
    }

    static SimplexForm monomial(int level, Exponents e, Mask dt, const Scalar& c) {
        if (static_cast<int>(e.size()) != level) throw std::invalid_argument("exponent vector has wrong length");
        SimplexForm f(level);
        f.add_term(std::move(e), dt, c);
        return f;
    }
    static SimplexForm constant(int level, const Scalar& c) { return monomial(level, Exponents(static_cast<std::size_t>(level), 0), 0, c); }
    // Coordinate t_i, 1 <= i <= level.
    static SimplexForm t(int level, int i) {
        Exponents e(static_cast<std::size_t>(level), 0);
        e.at(static_cast<std::size_t>(i - 1)) = 1;
        return monomial(level, std::move(e), 0, Scalar(1));
    }
    static SimplexForm dt(int level, int i) {
        if (i < 1 || i > level) throw std::out_of_range("dt index");
        return monomial(level, Exponents(static_cast<std::size_t>(level), 0), Mask(1) << (i - 1), Scalar(1));
    }
    static SimplexForm volume(int level) {
        return monomial(level, Exponents(static_cast<std::size_t>(level), 0), (Mask(1) << level) - 1, Scalar(1));
    }

    int level() const { return level_; }
    const std::map<Key, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(Exponents e, Mask dt, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(Key{std::move(e), dt}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    int degree() const {
        int d = -1;
        for (const auto& [key, c] : terms_) {
            int dk = degree_of(key.second);
            if (d == -1) d = dk;
            else if (d != dk) return -1;
        }
        return d;
    }

    SimplexForm part_of_degree(int deg) const {
        SimplexForm r(level_);
        for (const auto& [key, c] : terms_)
            if (degree_of(key.second) == deg) r.terms_.emplace(key, c);
        return r;
    }

    SimplexForm& operator+=(const SimplexForm& o) {
        check_level(o);
        if (terms_.empty()) level_ = o.level_;
        for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, c);
        return *this;
    }
    SimplexForm& operator-=(const SimplexForm& o) {
        check_level(o);
        if (terms_.empty()) level_ = o.level_;
        for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, -c);
        return *this;
    }
    SimplexForm operator-() const { return scaled(Scalar(-1)); }
    friend SimplexForm operator+(SimplexForm a, const SimplexForm& b) { return a += b; }
    friend SimplexForm operator-(SimplexForm a, const SimplexForm& b) { return a -= b; }

    SimplexForm scaled(const Scalar& s) const {
        SimplexForm r(level_);
        if (s.is_zero()) return r;
        for (const auto& [key, c] : terms_) r.add_term(key.first, key.second, c * s);
        return r;
    }

    friend SimplexForm operator*(const SimplexForm& a, const SimplexForm& b) {
        a.check_level(b);
        SimplexForm r(a.level_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                int s = wedge_sign(ka.second, kb.second);
                if (s == 0) continue;
                Exponents e = ka.first;
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += kb.first[i];
                Scalar c = ca * cb;
                r.add_term(std::move(e), ka.second | kb.second, s > 0 ? c : -c);
            }
        return r;
    }

    SimplexForm d() const {
        SimplexForm r(level_);
        for (const auto& [key, c] : terms_)
            for (int i = 0; i < level_; ++i) {
                int ei = key.first[static_cast<std::size_t>(i)];
                if (ei == 0 || (key.second >> i & 1u)) continue;
                Exponents e = key.first;
                --e[static_cast<std::size_t>(i)];
                Scalar v = c * Scalar(ei);
                r.add_term(std::move(e), key.second | (Mask(1) << i), insert_sign(key.second, i) > 0 ? v : -v);
            }
        return r;
    }

    // Pullback along the i-th coface Delta^{k-1} -> Delta^k. Face 0 is the
    // facet sum t = 1 (t_1 = 1 - s_1 - ... - s_{k-1}, t_j = s_{j-1});
    // face i >= 1 is t_i = 0.
    SimplexForm face(int i) const {
        if (level_ < 1 || i < 0 || i > level_) throw std::out_of_range("simplex face index");
        const int k = level_;
        SimplexForm r(k - 1);
        if (i >= 1) {
            const std::size_t idx = static_cast<std::size_t>(i - 1);
            for (const auto& [key, c] : terms_) {
                if (key.first[idx] != 0 || (key.second >> idx & 1u)) continue;
                Exponents e;
                for (std::size_t j = 0; j < key.first.size(); ++j)
                    if (j != idx) e.push_back(key.first[j]);
                Mask low = key.second & ((Mask(1) << idx) - 1);
                Mask high = (key.second >> (idx + 1)) << idx;
                r.add_term(std::move(e), low | high, c);
            }
            return r;
        }
        SimplexForm one_minus = constant(k - 1, Scalar(1));
        SimplexForm minus_dsum(k - 1);
        for (int j = 1; j < k; ++j) {
            one_minus -= t(k - 1, j);
            minus_dsum -= dt(k - 1, j);
        }
        std::map<int, SimplexForm> powers;
        for (const auto& [key, c] : terms_) {
            int e1 = key.first[0];
            auto it = powers.find(e1);
            if (it == powers.end()) {
                SimplexForm p = constant(k - 1, Scalar(1));
                for (int r2 = 0; r2 < e1; ++r2) p = p * one_minus;
                it = powers.emplace(e1, std::move(p)).first;
            }
            Exponents rest(key.first.begin() + 1, key.first.end());
            SimplexForm term = it->second * monomial(k - 1, std::move(rest), 0, c);
            for (Mask m = key.second; m; m &= m - 1) {
                int b = std::countr_zero(m);
                term = term * (b == 0 ? minus_dsum : dt(k - 1, b));
            }
            r += term;
        }
        return r;
    }

    // Exact integral over Delta^k with orientation dt_1 ^ ... ^ dt_k; zero unless
    // top degree.
    Scalar integrate() const {
        const Mask top = (Mask(1) << level_) - 1;
        Scalar total;
        for (const auto& [key, c] : terms_) {
            if (key.second != top) continue;
            total += c * Scalar(dirichlet_integral(key.first, level_));
        }
        return total;
    }

    // Integral over the oriented boundary sum_i (-1)^i face_i.
    Scalar integrate_boundary() const {
        Scalar total;
        for (int i = 0; i <= level_; ++i) {
            Scalar v = face(i).integrate();
            total += (i % 2 == 0) ? v : -v;
        }
        return total;
    }

    // prod e_i! / (n + sum e_i)!
    static Rational dirichlet_integral(const Exponents& e, int n) {
        Rational num = 1;
        int total = n;
        for (int x : e) {
            num *= factorial(x);
            total += x;
        }
        return num / factorial(total);
    }

    friend bool operator==(const SimplexForm& a, const SimplexForm& b) { return a.terms_ == b.terms_; }
    friend std::ostream& operator<<(std::ostream& os, const SimplexForm& f) { return os << f.str(); }
    friend bool operator!=(const SimplexForm& a, const SimplexForm& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [key, c] : terms_) {
            if (!first) os << " + ";
            os << "(" << c << ")";
            for (std::size_t i = 0; i < key.first.size(); ++i)
                if (key.first[i]) os << "*t" << i + 1 << (key.first[i] > 1 ? "^" + std::to_string(key.first[i]) : "");
            if (key.second) os << "*" << mask_str(key.second, "dt");
            first = false;
        }
        return os.str();
    }

private:
    void check_level(const SimplexForm& o) const {
        if (o.level_ != level_ && !o.terms_.empty() && !terms_.empty()) throw std::invalid_argument("simplex level mismatch");
    }

    int level_ = 0;
    std::map<Key, Scalar> terms_;
};

}  // namespace gerbejlo

#endif
