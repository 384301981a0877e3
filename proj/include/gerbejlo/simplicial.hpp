#ifndef GERBEJLO_SIMPLICIAL_HPP
#define GERBEJLO_SIMPLICIAL_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gerbejlo {

// Nondecreasing map [source] -> [target].
class DeltaMorphism {
public:
    DeltaMorphism(int source, int target, std::vector<int> values)
        : source_(source), target_(target), values_(std::move(values)) {
        if (source_ < 0 || target_ < 0 || static_cast<int>(values_.size()) != source_ + 1)
            throw std::invalid_argument("DeltaMorphism: wrong arity");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] < 0 || values_[i] > target_) throw std::invalid_argument("DeltaMorphism: value out of range");
            if (i > 0 && values_[i] < values_[i - 1]) throw std::invalid_argument("DeltaMorphism: not monotone");
        }
    }

    static DeltaMorphism identity(int n) {
        std::vector<int> v(n + 1);
        std::iota(v.begin(), v.end(), 0);
        return {n, n, std::move(v)};
    }

    // delta^n_i : [n-1] -> [n], skips i.
    static DeltaMorphism face(int n, int i) {
        if (n < 1 || i < 0 || i > n) throw std::out_of_range("face index");
        std::vector<int> v;
        for (int k = 0; k < n; ++k) v.push_back(k < i ? k : k + 1);
        return {n - 1, n, std::move(v)};
    }

    // sigma^n_j : [n+1] -> [n], hits j twice.
    static DeltaMorphism degeneracy(int n, int j) {
        if (n < 0 || j < 0 || j > n) throw std::out_of_range("degeneracy index");
        std::vector<int> v;
        for (int k = 0; k <= n + 1; ++k) v.push_back(k <= j ? k : k - 1);
        return {n + 1, n, std::move(v)};
    }

    int source() const { return source_; }
    int target() const { return target_; }
    const std::vector<int>& values() const { return values_; }
    int operator()(int k) const { return values_.at(static_cast<std::size_t>(k)); }

    bool operator==(const DeltaMorphism&) const = default;

    // Unique factorization f = delta_{i_1} ... delta_{i_s} sigma_{j_1} ... sigma_{j_t}
    // with i_1 > ... > i_s and j_1 < ... < j_t.
    struct NormalForm {
        std::vector<int> faces;        // descending
        std::vector<int> degeneracies; // ascending
        bool operator==(const NormalForm&) const = default;
    };

    NormalForm normal_form() const {
        NormalForm nf;
        for (int i = target_; i >= 0; --i)
            if (std::find(values_.begin(), values_.end(), i) == values_.end()) nf.faces.push_back(i);
        for (int j = 0; j < source_; ++j)
            if (values_[static_cast<std::size_t>(j)] == values_[static_cast<std::size_t>(j) + 1]) nf.degeneracies.push_back(j);
        return nf;
    }

    static DeltaMorphism from_normal_form(int source, const NormalForm& nf) {
        DeltaMorphism f = identity(source);
        int level = source;
        for (auto it = nf.degeneracies.rbegin(); it != nf.degeneracies.rend(); ++it) {
            f = compose(degeneracy(level - 1, *it), f);
            --level;
        }
        for (auto it = nf.faces.rbegin(); it != nf.faces.rend(); ++it) {
            f = compose(face(level + 1, *it), f);
            ++level;
        }
        return f;
    }

    // compose(f, g) = f o g; requires g.target() == f.source().
    friend DeltaMorphism compose(const DeltaMorphism& f, const DeltaMorphism& g) {
        if (g.target_ != f.source_) throw std::invalid_argument("compose: mismatched objects");
        std::vector<int> v;
        for (int x : g.values_) v.push_back(f(x));
        return {g.source_, f.target_, std::move(v)};
    }

    std::string str() const {
        std::ostringstream os;
        os << "[" << source_ << "]->[" << target_ << "](";
        for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
        os << ")";
        return os.str();
    }

private:
    int source_, target_;
    std::vector<int> values_;
};

// Cyclic operator tau(a_0..a_n) = (a_n, a_0, .., a_{n-1}).
template <class T>
std::vector<T> cyclic_tau(std::vector<T> args) {
    if (args.size() > 1) std::rotate(args.rbegin(), args.rbegin() + 1, args.rend());
    return args;
}

struct GroupElement {
    std::vector<long long> coords;

    auto operator<=>(const GroupElement&) const = default;
    bool operator==(const GroupElement&) const = default;

    friend void encode(std::string& out, const GroupElement& g) {
        out.push_back(static_cast<char>(g.coords.size()));
        out.append(reinterpret_cast<const char*>(g.coords.data()), g.coords.size() * sizeof(long long));
    }

    std::string str() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < coords.size(); ++i) os << (i ? "," : "") << coords[i];
        os << ")";
        return os.str();
    }
};

using GroupTuple = std::vector<GroupElement>;

inline std::string tuple_str(const GroupTuple& t) {
    std::string s = "[";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i].str();
    return s + "]";
}
// Z^r x prod Z/N_i written additively; the multiplicative product g*h is
// mul(g, h).
class AbelianGroup {
public:
    AbelianGroup() = default;
    AbelianGroup(int free_rank, std::vector<long long> torsion) : free_rank_(free_rank), torsion_(std::move(torsion)) {
        if (free_rank_ < 0) throw std::invalid_argument("negative free rank");
        for (auto n : torsion_)
            if (n < 1) throw std::invalid_argument("torsion orders must be positive");
    }

    int free_rank() const { return free_rank_; }
    const std::vector<long long>& torsion() const { return torsion_; }
    int rank() const { return free_rank_ + static_cast<int>(torsion_.size()); }
    bool is_finite() const { return free_rank_ == 0; }

    long long order() const {
        if (!is_finite()) throw std::logic_error("infinite group has no order");
        long long n = 1;
        for (auto t : torsion_) n *= t;
        return n;
    }

    GroupElement identity() const { return GroupElement{std::vector<long long>(static_cast<std::size_t>(rank()), 0)}; }

    GroupElement make(std::vector<long long> c) const {
        if (static_cast<int>(c.size()) != rank()) throw std::invalid_argument("group element has wrong rank");
        return reduce(GroupElement{std::move(c)});
    }

    GroupElement reduce(GroupElement g) const {
        for (std::size_t i = 0; i < torsion_.size(); ++i) {
            auto& x = g.coords[static_cast<std::size_t>(free_rank_) + i];
            x %= torsion_[i];
            if (x < 0) x += torsion_[i];
        }
        return g;
    }

    bool contains(const GroupElement& g) const {
        if (static_cast<int>(g.coords.size()) != rank()) return false;
        for (std::size_t i = 0; i < torsion_.size(); ++i) {
            auto x = g.coords[static_cast<std::size_t>(free_rank_) + i];
            if (x < 0 || x >= torsion_[i]) return false;
        }
        return true;
    }

    GroupElement mul(const GroupElement& a, const GroupElement& b) const {
        GroupElement r = a;
        for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
        return reduce(std::move(r));
    }
    GroupElement inv(const GroupElement& a) const {
        GroupElement r = a;
        for (auto& x : r.coords) x = -x;
        return reduce(std::move(r));
    }
    GroupElement product(const GroupTuple& t, std::size_t begin, std::size_t end) const {
        GroupElement r = identity();
        for (std::size_t i = begin; i < end; ++i) r = mul(r, t[i]);
        return r;
    }

    // All elements for finite groups; for infinite groups the box |x_i| <= radius
    // on free coordinates.
    std::vector<GroupElement> window(long long radius) const {
        std::vector<GroupElement> out{identity()};
        for (int i = 0; i < rank(); ++i) {
            std::vector<GroupElement> next;
            long long lo, hi;
            if (i < free_rank_) {
                lo = -radius;
                hi = radius;
            } else {
                lo = 0;
                hi = torsion_[static_cast<std::size_t>(i - free_rank_)] - 1;
            }
            for (const auto& g : out)
                for (long long x = lo; x <= hi; ++x) {
                    GroupElement h = g;
                    h.coords[static_cast<std::size_t>(i)] = x;
                    next.push_back(h);
                }
            out = std::move(next);
        }
        return out;
    }

    bool operator==(const AbelianGroup&) const = default;

private:
    int free_rank_ = 0;
    std::vector<long long> torsion_;
};

// Group part of a nerve simplex; the base point is carried by the caller through
// the BasePoint functor for face 0.
template <class Point>
struct NerveSimplex {
    Point base;
    GroupTuple arrows;
    bool operator==(const NerveSimplex&) const = default;
};

// delta^k_i on (x, g_1..g_k): i = 0 moves x to x*g_1 and drops g_1; middle faces
// multiply g_i g_{i+1}; i = k drops g_k.
template <class Point, class RightAction>
NerveSimplex<Point> nerve_face(const AbelianGroup& group, int i, const NerveSimplex<Point>& s, RightAction&& act) {
    const int k = static_cast<int>(s.arrows.size());
    if (k < 1 || i < 0 || i > k) throw std::out_of_range("nerve_face index");
    NerveSimplex<Point> out;
    if (i == 0) {
        out.base = act(s.base, s.arrows[0]);
        out.arrows.assign(s.arrows.begin() + 1, s.arrows.end());
    } else if (i == k) {
        out.base = s.base;
        out.arrows.assign(s.arrows.begin(), s.arrows.end() - 1);
    } else {
        out.base = s.base;
        for (int j = 0; j < k; ++j) {
            if (j == i - 1) out.arrows.push_back(group.mul(s.arrows[static_cast<std::size_t>(j)], s.arrows[static_cast<std::size_t>(j) + 1]));
            else if (j != i) out.arrows.push_back(s.arrows[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

template <class Point>
NerveSimplex<Point> nerve_degeneracy(const AbelianGroup& group, int j, const NerveSimplex<Point>& s) {
    const int k = static_cast<int>(s.arrows.size());
    if (j < 0 || j > k) throw std::out_of_range("nerve_degeneracy index");
    NerveSimplex<Point> out = s;
    out.arrows.insert(out.arrows.begin() + j, group.identity());
    return out;
}

// Group-tuple faces without a base point (the i = 0 face just drops g_1).
inline GroupTuple tuple_face(const AbelianGroup& group, int i, const GroupTuple& t) {
    struct NoPoint {
        bool operator==(const NoPoint&) const = default;
    };
    NerveSimplex<NoPoint> s{NoPoint{}, t};
    return nerve_face(group, i, s, [](NoPoint p, const GroupElement&) { return p; }).arrows;
}

// varpi^n_{i_0..i_m}: the arrow between consecutive chosen vertices of the
// composable string; descending pairs give the inverse product.
inline GroupTuple varpi(const AbelianGroup& group, int n, const std::vector<int>& indices, const GroupTuple& t) {
    if (static_cast<int>(t.size()) != n) throw std::invalid_argument("varpi: tuple length");
    if (indices.empty()) throw std::invalid_argument("varpi: empty index list");
    for (int i : indices)
        if (i < 0 || i > n) throw std::invalid_argument("varpi: index out of range");
    GroupTuple out;
    for (std::size_t k = 1; k < indices.size(); ++k) {
        int a = indices[k - 1], b = indices[k];
        if (a < b) out.push_back(group.product(t, static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
        else if (a == b) out.push_back(group.identity());
        else out.push_back(group.inv(group.product(t, static_cast<std::size_t>(b), static_cast<std::size_t>(a))));
    }
    return out;
}

}  // namespace gerbejlo

#endif
