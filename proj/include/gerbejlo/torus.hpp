#ifndef GERBEJLO_TORUS_HPP
#define GERBEJLO_TORUS_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exact.hpp"
#include "simplicial.hpp"

namespace gerbejlo {

using Lattice = std::vector<int>;
using Mask = std::uint32_t;

inline int degree_of(Mask m) { return std::popcount(m); }

// Sign of the shuffle that sorts the concatenation of two increasing index sets;
// zero if they overlap.
inline int wedge_sign(Mask a, Mask b) {
    if (a & b) return 0;
    int swaps = 0;
    for (Mask rest = b; rest; rest &= rest - 1) {
        int i = std::countr_zero(rest);
        Mask above = (i >= 31) ? 0u : (~Mask(0) << (i + 1));
        swaps += std::popcount(a & above);
    }
    return (swaps & 1) ? -1 : 1;
}

// Sign of moving generator `bit` in front of the set `m` (bit not in m).
inline int insert_sign(Mask m, int bit) { return (std::popcount(m & ((Mask(1) << bit) - 1)) & 1) ? -1 : 1; }

inline Lattice lattice_add(const Lattice& a, const Lattice& b) {
    Lattice r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline bool lattice_is_zero(const Lattice& a) {
    for (int x : a)
        if (x != 0) return false;
    return true;
}

inline std::string lattice_str(const Lattice& k) {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
    return s + ")";
}

inline std::string mask_str(Mask m, const char* prefix) {
    std::string s;
    for (Mask rest = m; rest; rest &= rest - 1) {
        if (!s.empty()) s += "^";
        s += prefix + std::to_string(std::countr_zero(rest) + 1);
    }
    return s;
}

// Finite Fourier sums of forms on T^m: terms c * e_k dx_S.
class ManifoldForm {
public:
    using Key = std::pair<Lattice, Mask>;

    ManifoldForm() = default;
    explicit ManifoldForm(int dim) : dim_(dim) {}

    static ManifoldForm monomial(int dim, Lattice k, Mask dx, const Scalar& c) {
        if (static_cast<int>(k.size()) != dim) throw std::invalid_argument("lattice vector has wrong dimension");
        ManifoldForm f(dim);
        f.add_term(std::move(k), dx, c);
        return f;
    }
    static ManifoldForm constant(int dim, const Scalar& c) { return monomial(dim, Lattice(static_cast<std::size_t>(dim), 0), 0, c); }
    static ManifoldForm exp_mode(int dim, Lattice k) { return monomial(dim, std::move(k), 0, Scalar(1)); }
    static ManifoldForm dx(int dim, int j) { return monomial(dim, Lattice(static_cast<std::size_t>(dim), 0), Mask(1) << j, Scalar(1)); }
    static ManifoldForm volume(int dim) {
        return monomial(dim, Lattice(static_cast<std::size_t>(dim), 0), (Mask(1) << dim) - 1, Scalar(1));
    }

    int dim() const { return dim_; }
    const std::map<Key, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(Lattice k, Mask dx, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(Key{std::move(k), dx}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    // Homogeneous degree, or -1 for zero / mixed input.
    int degree() const {
        int d = -1;
        for (const auto& [key, c] : terms_) {
            int dk = degree_of(key.second);
            if (d == -1) d = dk;
            else if (d != dk) return -1;
        }
        return d;
    }

    ManifoldForm part_of_degree(int deg) const {
        ManifoldForm r(dim_);
        for (const auto& [key, c] : terms_)
            if (degree_of(key.second) == deg) r.terms_.emplace(key, c);
        return r;
    }

    ManifoldForm& operator+=(const ManifoldForm& o) {
        adopt_dim(o);
        for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, c);
        return *this;
    }
    ManifoldForm& operator-=(const ManifoldForm& o) {
        adopt_dim(o);
        for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, -c);
        return *this;
    }
    ManifoldForm operator-() const { return scaled(Scalar(-1)); }
    friend ManifoldForm operator+(ManifoldForm a, const ManifoldForm& b) { return a += b; }
    friend ManifoldForm operator-(ManifoldForm a, const ManifoldForm& b) { return a -= b; }

    ManifoldForm scaled(const Scalar& s) const {
        ManifoldForm r(dim_);
        if (s.is_zero()) return r;
        for (const auto& [key, c] : terms_) r.add_term(key.first, key.second, c * s);
        return r;
    }
    friend ManifoldForm operator*(const Scalar& s, const ManifoldForm& f) { return f.scaled(s); }

    // Wedge product.
    friend ManifoldForm operator*(const ManifoldForm& a, const ManifoldForm& b) {
        ManifoldForm r(a.dim_ ? a.dim_ : b.dim_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                int s = wedge_sign(ka.second, kb.second);
                if (s == 0) continue;
                Scalar c = ca * cb;
                r.add_term(lattice_add(ka.first, kb.first), ka.second | kb.second, s > 0 ? c : -c);
            }
        return r;
    }

    // d(c e_k dx_S) = sum_j k_j c e_k dx_j ^ dx_S.
    ManifoldForm d() const {
        ManifoldForm r(dim_);
        for (const auto& [key, c] : terms_)
            for (int j = 0; j < dim_; ++j) {
                int kj = key.first[static_cast<std::size_t>(j)];
                if (kj == 0 || (key.second >> j & 1u)) continue;
                Scalar v = c * Scalar(kj);
                r.add_term(key.first, key.second | (Mask(1) << j), insert_sign(key.second, j) > 0 ? v : -v);
            }
        return r;
    }

    // Constant-mode coefficient of the top form.
    Scalar integrate() const {
        auto it = terms_.find(Key{Lattice(static_cast<std::size_t>(dim_), 0), (Mask(1) << dim_) - 1});
        return it == terms_.end() ? Scalar() : it->second;
    }

    // Coefficient function of dx_S as a 0-form.
    ManifoldForm coefficient_of(Mask s) const {
        ManifoldForm r(dim_);
        for (const auto& [key, c] : terms_)
            if (key.second == s) r.add_term(key.first, 0, c);
        return r;
    }

    friend bool operator==(const ManifoldForm& a, const ManifoldForm& b) { return a.terms_ == b.terms_; }

    friend void encode(std::string& out, const ManifoldForm& a) {
        encode(out, static_cast<long long>(a.terms_.size()));
        for (const auto& [key, c] : a.terms_) {
            out.append(reinterpret_cast<const char*>(key.first.data()), key.first.size() * sizeof(int));
            out.append(reinterpret_cast<const char*>(&key.second), sizeof key.second);
            encode(out, c);
        }
    }
    friend std::ostream& operator<<(std::ostream& os, const ManifoldForm& f) { return os << f.str(); }
    friend bool operator!=(const ManifoldForm& a, const ManifoldForm& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [key, c] : terms_) {
            if (!first) os << " + ";
            os << "(" << c << ")";
            if (!lattice_is_zero(key.first)) os << "*e" << lattice_str(key.first);
            if (key.second) os << "*" << mask_str(key.second, "dx");
            first = false;
        }
        return os.str();
    }

private:
    void adopt_dim(const ManifoldForm& o) {
        if (dim_ == 0) dim_ = o.dim_;
    }

    int dim_ = 0;
    std::map<Key, Scalar> terms_;
};

using TorusFunction = ManifoldForm;

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// x -> A x + v on R^m / Z^m with A in GL(m, Z) and v in Q^m taken mod Z^m.
struct AffineMap {
    std::vector<std::vector<long long>> matrix;
    std::vector<Rational> shift;

    static AffineMap identity(int m) {
        AffineMap a;
        a.matrix.assign(static_cast<std::size_t>(m), std::vector<long long>(static_cast<std::size_t>(m), 0));
        for (int i = 0; i < m; ++i) a.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
        a.shift.assign(static_cast<std::size_t>(m), Rational(0));
        return a;
    }

    int dim() const { return static_cast<int>(shift.size()); }

    void normalize() {
        for (auto& q : shift) {
            q.canonicalize();
            mpz_class fl;
            mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
            q -= Rational(fl);
        }
    }

    // (this o other)(x) = A(A' x + v') + v
    AffineMap after(const AffineMap& other) const {
        const int m = dim();
        AffineMap r;
        r.matrix.assign(static_cast<std::size_t>(m), std::vector<long long>(static_cast<std::size_t>(m), 0));
        r.shift = shift;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                long long acc = 0;
                for (int l = 0; l < m; ++l) acc += matrix[i][l] * other.matrix[l][j];
                r.matrix[i][j] = acc;
                r.shift[i] += Rational(static_cast<long>(matrix[i][j])) * other.shift[j];
            }
        r.normalize();
        return r;
    }

    long long determinant() const {
        const int m = dim();
        std::vector<std::vector<Rational>> a(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(m)));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a[i][j] = Rational(static_cast<long>(matrix[i][j]));
        Rational det = 1;
        for (int c = 0; c < m; ++c) {
            int p = c;
            while (p < m && a[p][c] == 0) ++p;
            if (p == m) return 0;
            if (p != c) {
                std::swap(a[p], a[c]);
                det = -det;
            }
            det *= a[c][c];
            for (int r = c + 1; r < m; ++r) {
                Rational f = a[r][c] / a[c][c];
                for (int k = c; k < m; ++k) a[r][k] -= f * a[c][k];
            }
        }
        return det.get_num().get_si();
    }

    AffineMap inverse() const {
        const int m = dim();
        std::vector<std::vector<Rational>> a(static_cast<std::size_t>(m), std::vector<Rational>(2 * static_cast<std::size_t>(m), Rational(0)));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a[i][j] = Rational(static_cast<long>(matrix[i][j]));
            a[i][m + i] = 1;
        }
        for (int c = 0; c < m; ++c) {
            int p = c;
            while (p < m && a[p][c] == 0) ++p;
            if (p == m) throw ScenarioError("singular action matrix");
            std::swap(a[p], a[c]);
            Rational inv = 1 / a[c][c];
            for (auto& x : a[c]) x *= inv;
            for (int r = 0; r < m; ++r) {
                if (r == c || a[r][c] == 0) continue;
                Rational f = a[r][c];
                for (int k = 0; k < 2 * m; ++k) a[r][k] -= f * a[c][k];
            }
        }
        AffineMap r = identity(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const Rational& q = a[i][m + j];
                if (q.get_den() != 1) throw ScenarioError("action matrix is not invertible over Z");
                r.matrix[i][j] = q.get_num().get_si();
            }
        for (int i = 0; i < m; ++i) {
            Rational acc = 0;
            for (int j = 0; j < m; ++j) acc -= Rational(static_cast<long>(r.matrix[i][j])) * shift[j];
            r.shift[i] = acc;
        }
        r.normalize();
        return r;
    }

    bool is_identity() const {
        AffineMap id = identity(dim());
        return matrix == id.matrix && shift == id.shift;
    }

    bool operator==(const AffineMap& o) const { return matrix == o.matrix && shift == o.shift; }
};

// Right action of Gamma on T^m and the induced pullback f -> f^g, f^g(x) = f(x g).
class TorusAction {
public:
    TorusAction() = default;
    TorusAction(AbelianGroup group, int dim, int cyclotomic, std::vector<AffineMap> generators)
        : group_(std::move(group)), dim_(dim), order_(cyclotomic), generators_(std::move(generators)) {
        validate();
    }

    const AbelianGroup& group() const { return group_; }
    int dim() const { return dim_; }
    int cyclotomic_order() const { return order_; }
    const std::vector<AffineMap>& generators() const { return generators_; }

    AffineMap affine(const GroupElement& g) const {
        {
            std::lock_guard lock(*mu_);
            if (auto it = cache_->find(g); it != cache_->end()) return it->second;
        }
        AffineMap acc = AffineMap::identity(dim_);
        for (std::size_t i = 0; i < generators_.size(); ++i) {
            long long n = g.coords[i];
            AffineMap step = n >= 0 ? generators_[i] : generators_[i].inverse();
            for (long long r = 0; r < (n >= 0 ? n : -n); ++r) acc = step.after(acc);
        }
        std::lock_guard lock(*mu_);
        cache_->emplace(g, acc);
        return acc;
    }

    // e_k(Ax + v) = zeta^{N k.v} e_{A^T k}; dx_i -> sum_j A_ij dx_j.
    ManifoldForm pullback(const GroupElement& g, const ManifoldForm& f) const {
        if (f.is_zero()) return f;
        const AffineMap a = affine(g);
        ManifoldForm out(dim_);
        for (const auto& [key, c] : f.terms()) {
            Rational phase = 0;
            Lattice k2(static_cast<std::size_t>(dim_), 0);
            for (int i = 0; i < dim_; ++i) {
                phase += Rational(key.first[i]) * a.shift[i];
                for (int j = 0; j < dim_; ++j) k2[j] += static_cast<int>(key.first[i] * a.matrix[i][j]);
            }
            Rational scaled = phase * order_;
            scaled.canonicalize();
            if (scaled.get_den() != 1) throw ScenarioError("character value outside Q(zeta_N)");
            Scalar coeff = c * Scalar::zeta_power(order_, scaled.get_num().get_si());
            ManifoldForm piece = ManifoldForm::monomial(dim_, k2, 0, coeff);
            for (Mask rest = key.second; rest; rest &= rest - 1) {
                int i = std::countr_zero(rest);
                ManifoldForm row(dim_);
                for (int j = 0; j < dim_; ++j)
                    if (a.matrix[i][j] != 0)
                        row.add_term(Lattice(static_cast<std::size_t>(dim_), 0), Mask(1) << j, Scalar(static_cast<long>(a.matrix[i][j])));
                piece = piece * row;
            }
            out += piece;
        }
        return out;
    }

private:
    void validate() {
        if (dim_ < 1 || dim_ > 16) throw ScenarioError("torus dimension must be between 1 and 16");
        if (static_cast<int>(generators_.size()) != group_.rank())
            throw ScenarioError("one action per group generator is required");
        for (auto& g : generators_) {
            if (g.dim() != dim_ || static_cast<int>(g.matrix.size()) != dim_) throw ScenarioError("action has wrong dimension");
            for (const auto& q : g.shift) {
                Rational s = q * order_;
                s.canonicalize();
                if (s.get_den() != 1)
                    throw ScenarioError("translation " + q.get_str() + " is not in (1/" + std::to_string(order_) + ")Z");
            }
            if (g.determinant() != 1) throw ScenarioError("action matrices must have determinant 1");
            g.normalize();
        }
        for (std::size_t a = 0; a < generators_.size(); ++a)
            for (std::size_t b = a + 1; b < generators_.size(); ++b)
                if (!(generators_[a].after(generators_[b]) == generators_[b].after(generators_[a])))
                    throw ScenarioError("generator actions do not commute");
        for (std::size_t t = 0; t < group_.torsion().size(); ++t) {
            std::size_t idx = static_cast<std::size_t>(group_.free_rank()) + t;
            AffineMap acc = AffineMap::identity(dim_);
            for (long long r = 0; r < group_.torsion()[t]; ++r) acc = generators_[idx].after(acc);
            if (!acc.is_identity()) throw ScenarioError("torsion generator action has the wrong order");
        }
    }

    AbelianGroup group_;
    int dim_ = 1;
    int order_ = 1;
    std::vector<AffineMap> generators_;
    std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
    std::shared_ptr<std::map<GroupElement, AffineMap>> cache_ = std::make_shared<std::map<GroupElement, AffineMap>>();
};

}  // namespace gerbejlo

#endif
