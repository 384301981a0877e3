#ifndef GERBEJLO_JLO_HPP
#define GERBEJLO_JLO_HPP

#include <map>
#include <memory>
#include <unordered_map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dd.hpp"
#include "gerbe.hpp"
#include "group_cochain.hpp"
#include "mixed.hpp"

namespace gerbejlo {

// Polynomial in the barycentric weights sigma_0..sigma_n with MixedForm
// coefficients; integration is against d sigma_1 .. d sigma_n over Delta^n.
class SigmaPolynomial {
public:
    SigmaPolynomial() = default;
    explicit SigmaPolynomial(int vars) : vars_(vars) {}

    static SigmaPolynomial constant(int vars, const MixedForm& f) {
        SigmaPolynomial p(vars);
        p.add(Exponents(static_cast<std::size_t>(vars), 0), f);
        return p;
    }

    int vars() const { return vars_; }
    const std::map<Exponents, MixedForm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const Exponents& e, const MixedForm& f) {
        if (f.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(e, f);
        if (!inserted) {
            it->second += f;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    SigmaPolynomial& operator+=(const SigmaPolynomial& o) {
        if (vars_ == 0) vars_ = o.vars_;
        for (const auto& [e, f] : o.terms_) add(e, f);
        return *this;
    }
    friend SigmaPolynomial operator+(SigmaPolynomial a, const SigmaPolynomial& b) { return a += b; }
    SigmaPolynomial operator-() const { return scaled(Scalar(-1)); }
    friend SigmaPolynomial operator-(SigmaPolynomial a, const SigmaPolynomial& b) { return a += -b; }

    SigmaPolynomial scaled(const Scalar& s) const {
        SigmaPolynomial r(vars_);
        for (const auto& [e, f] : terms_) r.add(e, f.scaled(s));
        return r;
    }

    friend SigmaPolynomial operator*(const SigmaPolynomial& x, const SigmaPolynomial& y) {
        SigmaPolynomial r(std::max(x.vars_, y.vars_));
        for (const auto& [ex, fx] : x.terms_)
            for (const auto& [ey, fy] : y.terms_) {
                Exponents e = ex;
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += ey[i];
                r.add(e, fx * fy);
            }
        return r;
    }
    friend SigmaPolynomial operator*(const SigmaPolynomial& x, const MixedForm& f) {
        SigmaPolynomial r(x.vars_);
        for (const auto& [e, c] : x.terms_) r.add(e, c * f);
        return r;
    }
    friend SigmaPolynomial operator*(const MixedForm& f, const SigmaPolynomial& x) {
        SigmaPolynomial r(x.vars_);
        for (const auto& [e, c] : x.terms_) r.add(e, f * c);
        return r;
    }

    // prod a_i! / (n + sum a_i)! per monomial.
    MixedForm integrate() const {
        MixedForm r;
        for (const auto& [e, f] : terms_) r += f.scaled(Scalar(SimplexForm::dirichlet_integral(e, vars_ - 1)));
        return r;
    }

    friend bool operator==(const SigmaPolynomial& a, const SigmaPolynomial& b) { return a.terms_ == b.terms_; }

private:
    int vars_ = 0;
    std::map<Exponents, MixedForm> terms_;
};

// sum_j (-sigma_var)^j x^j / j! for x without a degree-0 part.
inline SigmaPolynomial exp_nilpotent(const MixedForm& x, int var, int vars) {
    if (!x.bidegree_part(0, 0).is_zero()) throw std::domain_error("exp_nilpotent: degree-0 component is not nilpotent");
    SigmaPolynomial r = SigmaPolynomial::constant(vars, MixedForm::constant(x.dim(), x.level(), Scalar(1)));
    MixedForm power = MixedForm::constant(x.dim(), x.level(), Scalar(1));
    for (int j = 1;; ++j) {
        power = power * x;
        if (power.is_zero()) break;
        Exponents e(static_cast<std::size_t>(vars), 0);
        e[static_cast<std::size_t>(var)] = j;
        Scalar c(Rational(1) / factorial(j));
        r.add(e, (j % 2) ? power.scaled(-c) : power.scaled(c));
    }
    return r;
}

inline EndForm lift_to_level(const EndAlgebra& a, int level) {
    return a.map([level](const ManifoldForm& f, const GroupElement&, const GroupElement&) { return MixedForm::from_manifold(f, level); });
}

struct JLOOptions {
    // Entries summed for the trace of the bare unit when the group is infinite.
    long long unit_window = 1;
};

// tau(omega)(g_1..g_k)(a~0, a_1..a_n) =
//   int_M int_{Delta^k} omega_(k) ^ int_{Delta^n} tr(a~0 e^{-s_0 th} b_1 e^{-s_1 th} .. b_n e^{-s_n th})
// with th the rescaled curvature and b_i the rescaled derivation applied to a_i.
class JLOCharacter {
public:
    JLOCharacter(GerbeScenario scenario, CompatibleForm omega, JLOOptions options = {})
        : scenario_(std::move(scenario)), omega_(std::move(omega)), options_(options), memo_(std::make_shared<Memo>()) {}

    const GerbeScenario& scenario() const { return scenario_; }
    const CompatibleForm& form() const { return omega_; }

    // The trace polynomial before any integration.
    SigmaPolynomial integrand(const GroupTuple& t, const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) const {
        const int k = static_cast<int>(t.size());
        const int n = static_cast<int>(rest.size());
        const int vars = n + 1;
        Level& level = level_data(t);

        std::map<std::pair<GroupElement, int>, SigmaPolynomial> exps;
        auto weight = [&](const GroupElement& p, int i) -> const SigmaPolynomial& {
            auto key = std::make_pair(p, i);
            auto it = exps.find(key);
            if (it == exps.end()) {
                SigmaPolynomial w(vars);
                const auto& series = exp_series(level, p);
                for (std::size_t j = 0; j < series.size(); ++j) {
                    Exponents e(static_cast<std::size_t>(vars), 0);
                    e[static_cast<std::size_t>(i)] = static_cast<int>(j);
                    w.add(e, series[j]);
                }
                it = exps.emplace(key, std::move(w)).first;
            }
            return it->second;
        };

        std::vector<EndForm> b;
        for (const auto& a : rest) b.push_back(derivative(level, a));

        EndForm lead = lift_to_level(a0.element, k);
        if (!a0.unit.is_zero()) {
            std::vector<GroupElement> rows;
            if (n > 0) {
                auto r = b[0].rows();
                rows.assign(r.begin(), r.end());
            } else {
                rows = scenario_.group().window(scenario_.group().is_finite() ? 0 : options_.unit_window);
            }
            for (const auto& p : rows) lead.add(p, p, MixedForm::constant(scenario_.dim(), k, a0.unit));
        }

        using Matrix = std::map<std::pair<GroupElement, GroupElement>, SigmaPolynomial>;
        Matrix cur;
        for (const auto& [idx, f] : lead.entries()) cur[idx] = f * weight(idx.second, 0);
        for (int i = 1; i <= n; ++i) {
            std::map<GroupElement, std::vector<std::pair<GroupElement, const MixedForm*>>> by_row;
            for (const auto& [idx, f] : b[static_cast<std::size_t>(i - 1)].entries()) by_row[idx.first].emplace_back(idx.second, &f);
            Matrix next;
            for (const auto& [idx, poly] : cur) {
                auto it = by_row.find(idx.second);
                if (it == by_row.end()) continue;
                for (const auto& [col, f] : it->second) {
                    auto [slot, _] = next.try_emplace({idx.first, col}, SigmaPolynomial(vars));
                    slot->second += poly * *f;
                }
            }
            for (auto& [idx, poly] : next) poly = poly * weight(idx.second, i);
            cur = std::move(next);
        }
        SigmaPolynomial tr(vars);
        for (const auto& [idx, poly] : cur)
            if (idx.first == idx.second) tr += poly;
        return tr;
    }

    UScalar operator()(const GroupTuple& t, const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) const {
        std::string key = evaluation_key(t, a0, rest);
        if (auto hit = memo_->values.find(key)) return *hit;
        return memo_->values.insert(std::move(key), compute(t, a0, rest));
    }

    GroupCochain<EndAlgebra> cochain() const {
        JLOCharacter self = *this;
        return GroupCochain<EndAlgebra>(
            CochainFlavor::inhomogeneous,
            [self](const GroupTuple& t, const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& r) { return self(t, a0, r); },
            "tau(" + omega_.name() + ")");
    }

private:
    UScalar compute(const GroupTuple& t, const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) const {
        const MixedForm w = omega_(t);
        if (w.is_zero()) return UScalar();
        if (a0.element.is_zero() && a0.unit.is_zero()) return UScalar();
        for (const auto& a : rest)
            if (a.is_zero()) return UScalar();
        if (!closes(a0, rest)) return UScalar();
        MixedForm inner = integrand(t, a0, rest).integrate();
        return (w * inner).integrate_total();
    }

    // Whether some product of E-indices through the arguments returns to its start.
    static bool closes(const Unitized<EndAlgebra>& a0, const std::vector<EndAlgebra>& rest) {
        if (rest.empty()) {
            if (!a0.unit.is_zero()) return true;
            for (const auto& [idx, f] : a0.element.entries())
                if (idx.first == idx.second) return true;
            return false;
        }
        std::set<std::pair<GroupElement, GroupElement>> paths;
        for (const auto& [idx, f] : a0.element.entries()) paths.insert(idx);
        if (!a0.unit.is_zero())
            for (const auto& p : rest.front().rows()) paths.emplace(p, p);
        for (const auto& a : rest) {
            std::set<std::pair<GroupElement, GroupElement>> next;
            for (const auto& [start, end] : paths) {
                const EndAlgebra row = a.row(end);
                for (const auto& [idx, f] : row.entries()) next.emplace(start, idx.second);
            }
            paths = std::move(next);
            if (paths.empty()) return false;
        }
        for (const auto& [start, end] : paths)
            if (start == end) return true;
        return false;
    }

    // Per-tuple data shared by every evaluation at that tuple.
    struct Level {
        GroupTuple tuple;
        SimplicialConnection connection;
        SimplicialCurvature curvature;
        std::map<GroupElement, std::vector<MixedForm>> series;
        std::unordered_map<std::string, EndForm> derivatives;
    };

    Level& level_data(const GroupTuple& t) const {
        std::lock_guard lock(memo_->mutex);
        auto it = memo_->levels.find(t);
        if (it == memo_->levels.end())
            it = memo_->levels.emplace(t, std::make_unique<Level>(Level{t, SimplicialConnection(scenario_, t), vartheta(scenario_, t).rescaled(), {}, {}})).first;
        return *it->second;
    }

    // (-1)^j th^j / j! for the diagonal curvature entry at p.
    const std::vector<MixedForm>& exp_series(Level& level, const GroupElement& p) const {
        std::lock_guard lock(memo_->mutex);
        auto& series = level.series;
        if (auto it = series.find(p); it != series.end()) return it->second;
        const MixedForm x = level.curvature.entry(p);
        if (!x.bidegree_part(0, 0).is_zero()) throw std::domain_error("exp_nilpotent: degree-0 component is not nilpotent");
        std::vector<MixedForm> out{MixedForm::constant(x.dim(), x.level(), Scalar(1))};
        MixedForm power = out.front();
        for (int j = 1;; ++j) {
            power = power * x;
            if (power.is_zero()) break;
            Scalar c(Rational(1) / factorial(j));
            out.push_back((j % 2) ? power.scaled(-c) : power.scaled(c));
        }
        return series.emplace(p, std::move(out)).first->second;
    }

    EndForm derivative(Level& level, const EndAlgebra& a) const {
        std::string key;
        encode(key, a);
        {
            std::lock_guard lock(memo_->mutex);
            if (auto it = level.derivatives.find(key); it != level.derivatives.end()) return it->second;
        }
        EndForm d = level.connection.apply_u(lift_to_level(a, static_cast<int>(level.tuple.size())));
        std::lock_guard lock(memo_->mutex);
        return level.derivatives.emplace(std::move(key), d).first->second;
    }

    struct Memo {
        std::mutex mutex;
        EvaluationMemo values;
        std::map<GroupTuple, std::unique_ptr<Level>> levels;
    };

    GerbeScenario scenario_;
    CompatibleForm omega_;
    JLOOptions options_;
    std::shared_ptr<Memo> memo_;
};

// Which side of the chain-map identity carries the minus sign on b + uB.
enum class SignConvention {
    theorem,  // (b + uB) + delta'
    proof,    // -(b + uB) + delta'
    graded,   // (b + uB) + (-1)^k delta' at group level k
};

inline std::string to_string(SignConvention c) {
    switch (c) {
        case SignConvention::theorem: return "theorem";
        case SignConvention::proof: return "proof";
        case SignConvention::graded: return "graded";
    }
    return "?";
}

inline SignConvention parse_sign_convention(const std::string& s) {
    for (auto c : {SignConvention::theorem, SignConvention::proof, SignConvention::graded})
        if (s == to_string(c)) return c;
    throw std::invalid_argument("unknown sign convention '" + s + "'");
}

// Both sides of the chain-map identity on one sample.
struct ChainTerms {
    int level = 0;
    UScalar twisted;  // tau(Dtw omega)
    UScalar cyclic;   // (b + uB) tau omega
    UScalar group;    // delta' tau omega

    UScalar rhs(SignConvention c) const {
        switch (c) {
            case SignConvention::theorem: return cyclic + group;
            case SignConvention::proof: return group - cyclic;
            case SignConvention::graded: return level % 2 ? cyclic - group : cyclic + group;
        }
        return {};
    }
    bool holds(SignConvention c) const { return twisted == rhs(c); }
    bool degenerate() const { return twisted.is_zero() && cyclic.is_zero() && group.is_zero(); }
};

struct ChainSample {
    GroupTuple tuple;
    Unitized<EndAlgebra> leading;
    std::vector<EndAlgebra> rest;
};

inline ChainTerms chain_terms(const GerbeScenario& s, const CompatibleForm& omega, const ChainSample& x, JLOOptions opt = {}) {
    const auto mod = s.end_module();
    JLOCharacter tau(s, omega, opt);
    JLOCharacter tau_twisted(s, twisted_differential(omega, dd_rescaled(s)), opt);
    const auto c = tau.cochain();
    ChainTerms terms;
    terms.level = static_cast<int>(x.tuple.size());
    terms.twisted = tau_twisted(x.tuple, x.leading, x.rest);
    terms.cyclic = b_plus_uB(c.at(x.tuple))(x.leading, x.rest);
    terms.group = group_delta_prime(mod, c)(x.tuple, x.leading, x.rest);
    return terms;
}

struct ChainReport {
    int checks = 0;
    int skipped = 0;
    int nondegenerate = 0;
    std::optional<std::string> failure;
    bool passed() const { return !failure.has_value(); }
};

inline std::string chain_witness(const ChainSample& x, const UScalar& lhs, const UScalar& rhs) {
    return "tuple " + tuple_str(x.tuple) + " n=" + std::to_string(x.rest.size()) + ": lhs " + lhs.str() + " rhs " + rhs.str();
}

// Checks tau Dtw = (rhs under the convention) tau on every sample.
inline ChainReport chain_check(const GerbeScenario& s, const CompatibleForm& omega, const std::vector<ChainSample>& samples,
                               SignConvention convention, JLOOptions opt = {}) {
    ChainReport rep;
    for (const auto& x : samples) {
        ChainTerms t;
        try {
            t = chain_terms(s, omega, x, opt);
        } catch (const std::domain_error&) {
            ++rep.skipped;
            continue;
        }
        ++rep.checks;
        if (!t.degenerate()) ++rep.nondegenerate;
        if (!t.holds(convention) && !rep.failure) rep.failure = chain_witness(x, t.twisted, t.rhs(convention));
    }
    return rep;
}

}  // namespace gerbejlo

#endif
