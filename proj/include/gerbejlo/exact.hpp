#ifndef GERBEJLO_EXACT_HPP
#define GERBEJLO_EXACT_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gerbejlo {

using Rational = mpq_class;

class ArithmeticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Compact exact byte encodings, used as memo keys.
inline void encode(std::string& out, long long v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); }

inline void encode(std::string& out, const mpz_class& z) {
    const std::size_t limbs = mpz_size(z.get_mpz_t());
    encode(out, static_cast<long long>(mpz_sgn(z.get_mpz_t())) * static_cast<long long>(limbs + 1));
    for (std::size_t i = 0; i < limbs; ++i) {
        const mp_limb_t l = mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i));
        out.append(reinterpret_cast<const char*>(&l), sizeof l);
    }
}

inline void encode(std::string& out, const Rational& q) {
    encode(out, q.get_num());
    encode(out, q.get_den());
}

inline Rational factorial(int n) {
    mpz_class r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return Rational(r);
}

namespace detail {

// Integer polynomial helpers, coefficients low degree first.
using IntPoly = std::vector<mpz_class>;

inline IntPoly poly_divide_exact(IntPoly num, const IntPoly& den) {
    IntPoly q(num.size() - den.size() + 1, 0);
    for (std::size_t i = q.size(); i-- > 0;) {
        mpz_class c = num[i + den.size() - 1] / den.back();
        q[i] = c;
        for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= c * den[j];
    }
    return q;
}

inline IntPoly cyclotomic_poly(int n, std::map<int, IntPoly>& memo) {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    IntPoly p(n + 1, 0);
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d == 0) p = poly_divide_exact(p, cyclotomic_poly(d, memo));
    }
    memo[n] = p;
    return p;
}

}  // namespace detail

// Power-basis data for Q(zeta_N): reduction rule x^phi = -sum phi_i x^i.
struct CyclotomicField {
    int order = 1;
    int degree = 1;
    std::vector<Rational> modulus;  // monic, low degree first, size degree+1

    static const CyclotomicField& get(int n) {
        if (n < 1) throw ArithmeticError("cyclotomic order must be positive");
        static std::mutex mu;
        static std::map<int, std::unique_ptr<CyclotomicField>> registry;
        static std::map<int, detail::IntPoly> memo;
        std::lock_guard lock(mu);
        auto& slot = registry[n];
        if (!slot) {
            auto f = std::make_unique<CyclotomicField>();
            f->order = n;
            auto p = detail::cyclotomic_poly(n, memo);
            f->degree = static_cast<int>(p.size()) - 1;
            for (auto& c : p) f->modulus.emplace_back(c);
            slot = std::move(f);
        }
        return *slot;
    }
};

// Element of Q(zeta_N). Order 1 doubles as "rational constant" and adapts to
// the other operand's field in mixed arithmetic.
class Scalar {
public:
    Scalar() : order_(1), coords_(1, Rational(0)) {}
    Scalar(long v) : order_(1), coords_(1, Rational(v)) {}  // NOLINT
    Scalar(int v) : Scalar(static_cast<long>(v)) {}          // NOLINT
    Scalar(const Rational& q) : order_(1), coords_(1, q) {}  // NOLINT
    Scalar(int order, std::vector<Rational> coords) : order_(order), coords_(std::move(coords)) {
        const auto& f = CyclotomicField::get(order_);
        if (static_cast<int>(coords_.size()) > f.degree) reduce_long(f);
        coords_.resize(f.degree, Rational(0));
    }

    static Scalar rational(long num, long den = 1) {
        if (den == 0) throw ArithmeticError("zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return Scalar(q);
    }

    static Scalar zeta_power(int order, long exponent) {
        long e = exponent % order;
        if (e < 0) e += order;
        std::vector<Rational> c(static_cast<std::size_t>(e) + 1, Rational(0));
        c[static_cast<std::size_t>(e)] = 1;
        return Scalar(order, std::move(c));
    }

    int order() const { return order_; }
    const std::vector<Rational>& coords() const { return coords_; }

    bool is_zero() const {
        return std::all_of(coords_.begin(), coords_.end(), [](const Rational& q) { return q == 0; });
    }
    bool is_one() const {
        if (coords_[0] != 1) return false;
        return std::all_of(coords_.begin() + 1, coords_.end(), [](const Rational& q) { return q == 0; });
    }
    bool is_rational() const {
        return std::all_of(coords_.begin() + 1, coords_.end(), [](const Rational& q) { return q == 0; });
    }
    const Rational& rational_part() const { return coords_[0]; }

    Scalar in_field(int order) const {
        if (order == order_) return *this;
        if (order_ == 1 || is_rational()) {
            std::vector<Rational> c(CyclotomicField::get(order).degree, Rational(0));
            c[0] = coords_[0];
            return Scalar(order, std::move(c));
        }
        if (order % order_ == 0) {
            // zeta_M = zeta_N^(N/M)
            int step = order / order_;
            Scalar acc(order, {});
            for (std::size_t i = 0; i < coords_.size(); ++i) {
                if (coords_[i] == 0) continue;
                acc += zeta_power(order, static_cast<long>(i) * step) * Scalar(coords_[i]);
            }
            return acc;
        }
        throw ArithmeticError("incompatible cyclotomic orders " + std::to_string(order_) + " and " +
                              std::to_string(order));
    }

    Scalar& operator+=(const Scalar& o) {
        if (o.order_ == order_) {
            for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
            return *this;
        }
        int t = common_order(order_, o.order_);
        *this = in_field(t);
        return *this += o.in_field(t);
    }
    Scalar& operator-=(const Scalar& o) { return *this += -o; }
    Scalar operator-() const {
        Scalar r = *this;
        for (auto& c : r.coords_) c = -c;
        return r;
    }
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.order_ != b.order_) {
            if (a.order_ == 1) return b.scaled(a.coords_[0]);
            if (b.order_ == 1) return a.scaled(b.coords_[0]);
            int t = common_order(a.order_, b.order_);
            return a.in_field(t) * b.in_field(t);
        }
        if (a.order_ == 1) return Scalar(a.coords_[0] * b.coords_[0]);
        std::vector<Rational> prod(a.coords_.size() + b.coords_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.coords_.size(); ++i) {
            if (a.coords_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coords_.size(); ++j) {
                if (b.coords_[j] == 0) continue;
                prod[i + j] += a.coords_[i] * b.coords_[j];
            }
        }
        return Scalar(a.order_, std::move(prod));
    }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar scaled(const Rational& q) const {
        Scalar r = *this;
        for (auto& c : r.coords_) c *= q;
        return r;
    }

    Scalar inverse() const {
        if (is_zero()) throw ArithmeticError("inverse of zero");
        if (is_rational()) {
            Scalar r = *this;
            r.coords_[0] = 1 / coords_[0];
            return r;
        }
        // Solve (multiplication-by-this) x = 1 in the power basis.
        const int n = static_cast<int>(coords_.size());
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1, Rational(0)));
        for (int j = 0; j < n; ++j) {
            Scalar col = *this * zeta_power(order_, j);
            for (int i = 0; i < n; ++i) m[i][j] = col.coords_[i];
        }
        m[0][n] = 1;
        for (int c = 0; c < n; ++c) {
            int piv = c;
            while (piv < n && m[piv][c] == 0) ++piv;
            if (piv == n) throw ArithmeticError("singular multiplication map");
            std::swap(m[piv], m[c]);
            Rational inv = 1 / m[c][c];
            for (int k = c; k <= n; ++k) m[c][k] *= inv;
            for (int r = 0; r < n; ++r) {
                if (r == c || m[r][c] == 0) continue;
                Rational f = m[r][c];
                for (int k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
            }
        }
        std::vector<Rational> x(n);
        for (int i = 0; i < n; ++i) x[i] = m[i][n];
        return Scalar(order_, std::move(x));
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

    // Complex conjugation zeta -> zeta^{-1}.
    Scalar conj() const {
        Scalar acc(order_, {});
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (coords_[i] == 0) continue;
            acc += zeta_power(order_, -static_cast<long>(i)).scaled(coords_[i]);
        }
        return acc;
    }

    Scalar pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        Scalar result = Scalar(1).in_field(order_);
        Scalar base = *this;
        while (e > 0) {
            if (e & 1) result *= base;
            base *= base;
            e >>= 1;
        }
        return result;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.order_ == b.order_) return a.coords_ == b.coords_;
        if (a.is_rational() && b.is_rational()) return a.coords_[0] == b.coords_[0];
        try {
            int t = common_order(a.order_, b.order_);
            return a.in_field(t).coords_ == b.in_field(t).coords_;
        } catch (const ArithmeticError&) {
            return false;
        }
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Rational values encode alike in every field.
    friend void encode(std::string& out, const Scalar& a) {
        if (a.is_rational()) {
            encode(out, 1LL);
            encode(out, a.coords_[0]);
            return;
        }
        encode(out, static_cast<long long>(a.order_));
        for (const auto& c : a.coords_) encode(out, c);
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            const Rational& c = coords_[i];
            if (c == 0) continue;
            Rational mag = abs(c);
            if (!first) os << (c < 0 ? " - " : " + ");
            else if (c < 0) os << "-";
            if (i == 0) {
                os << mag.get_str();
            } else {
                if (mag != 1) os << mag.get_str() << "*";
                os << "z";
                if (i > 1) os << "^" << i;
            }
            first = false;
        }
        if (first) return "0";
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

private:
    static int common_order(int a, int b) {
        if (a == 1) return b;
        if (b == 1) return a;
        if (a % b == 0) return a;
        if (b % a == 0) return b;
        throw ArithmeticError("mixed cyclotomic orders " + std::to_string(a) + " and " + std::to_string(b));
    }

    void reduce_long(const CyclotomicField& f) {
        const std::size_t d = static_cast<std::size_t>(f.degree);
        for (std::size_t i = coords_.size(); i-- > d;) {
            Rational c = coords_[i];
            if (c == 0) continue;
            coords_[i] = 0;
            for (std::size_t j = 0; j < d; ++j) coords_[i - d + j] -= c * f.modulus[j];
        }
        coords_.resize(d);
    }

    int order_;
    std::vector<Rational> coords_;
};

// Laurent polynomial in the central even variable u.
template <class Coeff>
class ULaurent {
public:
    ULaurent() = default;
    explicit ULaurent(Coeff c, int exponent = 0) {
        if (!c.is_zero()) terms_.emplace(exponent, std::move(c));
    }

    const std::map<int, Coeff>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Coeff coefficient(int e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Coeff{} : it->second;
    }

    void add_term(int e, const Coeff& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    ULaurent& operator+=(const ULaurent& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    ULaurent& operator-=(const ULaurent& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    ULaurent operator-() const {
        ULaurent r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }
    friend ULaurent operator+(ULaurent a, const ULaurent& b) { return a += b; }
    friend ULaurent operator-(ULaurent a, const ULaurent& b) { return a -= b; }

    ULaurent times_u(int shift) const {
        ULaurent r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(e + shift, c);
        return r;
    }
    ULaurent scaled(const Scalar& s) const {
        ULaurent r;
        for (const auto& [e, c] : terms_) r.add_term(e, c * s);
        return r;
    }

    friend ULaurent operator*(const ULaurent& a, const ULaurent& b) {
        ULaurent r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
        return r;
    }

    friend bool operator==(const ULaurent& a, const ULaurent& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const ULaurent& a, const ULaurent& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            os << "(" << c << ")";
            if (e != 0) os << "*u^" << e;
            first = false;
        }
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const ULaurent& l) { return os << l.str(); }

private:
    std::map<int, Coeff> terms_;
};

using UScalar = ULaurent<Scalar>;

class SparseMatrix {
public:
    SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::map<std::pair<std::size_t, std::size_t>, Scalar>& entries() const { return entries_; }

    void set(std::size_t r, std::size_t c, const Scalar& v) {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseMatrix::set");
        if (v.is_zero()) entries_.erase({r, c});
        else entries_[{r, c}] = v;
    }
    Scalar get(std::size_t r, std::size_t c) const {
        auto it = entries_.find({r, c});
        return it == entries_.end() ? Scalar() : it->second;
    }

    std::vector<Scalar> apply(const std::vector<Scalar>& v) const {
        if (v.size() != cols_) throw std::invalid_argument("SparseMatrix::apply dimension");
        std::vector<Scalar> out(rows_);
        for (const auto& [rc, x] : entries_) out[rc.first] += x * v[rc.second];
        return out;
    }

private:
    std::size_t rows_, cols_;
    std::map<std::pair<std::size_t, std::size_t>, Scalar> entries_;
};

struct RankKernel {
    std::size_t rank = 0;
    std::vector<std::vector<Scalar>> kernel;
};

// Reduced row echelon form over the field; kernel vectors from free columns.
inline RankKernel rank_kernel(const SparseMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::map<std::size_t, Scalar>> work(rows);
    for (const auto& [rc, v] : m.entries()) work[rc.first][rc.second] = v;

    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && !work[piv].count(c)) ++piv;
        if (piv == rows) continue;
        std::swap(work[piv], work[r]);
        Scalar inv = work[r][c].inverse();
        for (auto& [k, v] : work[r]) v *= inv;
        for (std::size_t o = 0; o < rows; ++o) {
            if (o == r) continue;
            auto it = work[o].find(c);
            if (it == work[o].end()) continue;
            Scalar f = it->second;
            for (const auto& [k, v] : work[r]) {
                Scalar nv = work[o][k] - f * v;
                if (nv.is_zero()) work[o].erase(k);
                else work[o][k] = nv;
            }
        }
        pivot_cols.push_back(c);
        ++r;
    }

    RankKernel out;
    out.rank = pivot_cols.size();
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Scalar> v(cols);
        v[free] = Scalar(1);
        for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
            auto it = work[i].find(free);
            if (it != work[i].end()) v[pivot_cols[i]] = -it->second;
        }
        out.kernel.push_back(std::move(v));
    }
    return out;
}

}  // namespace gerbejlo

#endif
