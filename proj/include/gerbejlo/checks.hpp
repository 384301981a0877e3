#ifndef GERBEJLO_CHECKS_HPP
#define GERBEJLO_CHECKS_HPP

// Named identity checks over a parsed scenario, grouped by command.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dd.hpp"
#include "jlo.hpp"
#include "morphisms.hpp"
#include "sampling.hpp"
#include "scenario.hpp"

namespace gerbejlo {

enum class CheckStatus { pass, fail, skip };

inline std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skip: return "skip";
    }
    return "?";
}

struct CheckResult {
    std::string id;
    std::string anchor;  // the identity under test, in words
    std::string inputs_digest;
    CheckStatus status = CheckStatus::pass;
    std::string witness;
    std::string note;
    int cases = 0;
    double seconds = 0;
};

struct RunOptions {
    std::uint64_t seed = 1;
    int kmax = 2;
    int nmax = 1;
    int samples = 20;
    int pipeline_samples = 10;
    SignConvention sign_convention = SignConvention::graded;

    static RunOptions from_plan(const TestPlan& p) { return RunOptions{p.seed, p.kmax, p.nmax, p.samples, 10, p.sign_convention}; }
};

struct RunResult {
    std::string command;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> observations;

    int count(CheckStatus s) const {
        return static_cast<int>(std::count_if(checks.begin(), checks.end(), [s](const CheckResult& c) { return c.status == s; }));
    }
    bool passed() const { return count(CheckStatus::fail) == 0; }
};

// Draws for the chain-map identity: a tuple of length <= kmax, n <= nmax arguments.
inline ChainSample draw_chain_sample(Sampler& gen, const GerbeScenario& s, int kmax, int nmax) {
    const int k = gen.uniform(0, kmax), n = gen.uniform(0, nmax);
    ChainSample x{gen.tuple(s.group(), k), Unitized<EndAlgebra>::of(gen.end_element(s, 10)), {}};
    if (s.group().is_finite() && gen.coin()) x.leading.unit = gen.scalar(s.action().cyclotomic_order());
    for (int i = 0; i < n; ++i) x.rest.push_back(gen.end_element(s, 10));
    return x;
}

// Sections along one closing chain, with every low Fourier mode present.
inline PipelineSample draw_pipeline_sample(Sampler& gen, const std::shared_ptr<const GerbeScenario>& s, int nmax) {
    const int n = gen.uniform(0, nmax);
    std::vector<LSection> secs;
    for (const auto& a : gen.closing_sections(s, n, 1)) {
        LSection rich(s);
        for (const auto& [g, f] : a.values()) rich.add(g, gen.trigonometric(s->dim(), s->action().cyclotomic_order()));
        secs.push_back(std::move(rich));
    }
    return PipelineSample{Unitized<LSection>::of(secs.front()), std::vector<LSection>(secs.begin() + 1, secs.end())};
}

// A compatible form with simplicial degree <= 1 and manifold degrees 0 and 1.
inline CompatibleForm pipeline_form(const GerbeScenario& s, std::uint64_t seed) {
    return random_compatible_form(s, seed, 1, 0) + random_compatible_form(s, seed + 1, 1, 1);
}

class CheckRunner {
public:
    struct Outcome {
        CheckStatus status = CheckStatus::pass;
        std::string witness;
        int cases = 0;
        std::string note{};
    };

    CheckRunner(ScenarioFile file, RunOptions options)
        : file_(std::move(file)),
          options_(options),
          scenario_(std::make_shared<const GerbeScenario>(file_.build())),
          digest_(scenario_digest(file_)) {}

    // Runs with a different cocycle, for negative controls.
    CheckRunner(ScenarioFile file, GerbeScenario scenario, RunOptions options)
        : file_(std::move(file)),
          options_(options),
          scenario_(std::make_shared<const GerbeScenario>(std::move(scenario))),
          digest_(scenario_digest(file_) + "*") {}

    static const std::vector<std::string>& commands() {
        static const std::vector<std::string> c{"validate", "dd-class", "jlo-eval", "chain-check", "report"};
        return c;
    }

    RunResult run(const std::string& command) {
        RunResult r{command, {}, {}};
        if (command == "validate" || command == "report") validate(r);
        if (command == "dd-class" || command == "report") dd_class(r);
        if (command == "jlo-eval" || command == "report") jlo_eval(r);
        if (command == "chain-check" || command == "report") chain(r);
        if (std::find(commands().begin(), commands().end(), command) == commands().end())
            throw std::invalid_argument("unknown command '" + command + "'");
        return r;
    }

    const GerbeScenario& scenario() const { return *scenario_; }

    // The group itself when finite, otherwise a window around the identity.
    std::vector<GroupElement> elements() const {
        const auto& G = scenario_->group();
        if (!G.is_finite()) return G.window(1);
        std::vector<GroupElement> out;
        auto rec = [&](auto&& self, std::vector<long long>& c, std::size_t i) -> void {
            if (i == G.torsion().size()) {
                out.push_back(G.make(c));
                return;
            }
            for (long long v = 0; v < G.torsion()[i]; ++v) {
                c[i] = v;
                self(self, c, i + 1);
            }
        };
        std::vector<long long> c(G.torsion().size(), 0);
        rec(rec, c, 0);
        return out;
    }

    void validate(RunResult& r) {
        const auto& s = *scenario_;
        const auto E = elements();
        const auto n = static_cast<int>(E.size());
        auto from = [](std::optional<IdentityFailure> f, int cases) {
            return f ? Outcome{CheckStatus::fail, f->witness, cases} : Outcome{CheckStatus::pass, "", cases};
        };
        add(r, "normalization", "omega(1) = 0 and mu(1, g) = mu(g, 1) = 1", [&](Sampler&) { return from(check_normalization(s, E), n); });
        add(r, "mu-cocycle", "mu(g, h) mu(gh, k) = mu(g, hk) g.mu(h, k)", [&](Sampler&) { return from(check_mu_cocycle(s, E), n * n * n); });
        add(r, "alpha-cocycle", "g.alpha(h, k) - alpha(gh, k) + alpha(g, hk) - alpha(g, h) = 0",
            [&](Sampler&) { return from(check_alpha_cocycle(s, E), n * n * n); });
        add(r, "curvature-discrepancy", "theta_g + g.theta_h - theta_gh = d alpha(g, h)",
            [&](Sampler&) { return from(check_curvature_identity(s, E), n * n); });
        const auto entries = s.group().is_finite() ? E : s.group().window(2);
        add(r, "discrepancy-identity", "A(g) + g.A(h) - A(gh) = -alpha(g, h) on diagonal entries",
            [&](Sampler&) { return from(check_discrepancy_identity(s, E, entries), n * n * static_cast<int>(entries.size())); });
        add(r, "convolution-associativity", "(a * b) * c = a * (b * c) in the twisted convolution algebra", [&](Sampler& gen) {
            for (int i = 0; i < options_.samples; ++i) {
                auto a = gen.section(scenario_, gen.uniform(1, 4)), b = gen.section(scenario_, gen.uniform(1, 4)),
                     c = gen.section(scenario_, gen.uniform(1, 4));
                if (auto f = check_associativity(a, b, c)) return Outcome{CheckStatus::fail, f->witness, i + 1};
            }
            return Outcome{CheckStatus::pass, "", options_.samples};
        });
        const int levels = std::clamp(options_.kmax + 1, 1, 3);
        add(r, "curvature-compatibility", "faces of the simplicial curvature match the lower levels", [&](Sampler& gen) {
            std::vector<GroupTuple> tuples;
            for (int i = 0; i < options_.samples; ++i) tuples.push_back(gen.tuple(s.group(), levels));
            auto rep = check_curvature_compatibility(s, levels, tuples, s.group().window(1));
            return rep.passed() ? Outcome{CheckStatus::pass, "", rep.checks}
                                : Outcome{CheckStatus::fail, compatibility_witness(*rep.failure), rep.checks};
        });
        bool vanishes = true;
        add(r, "dd-compatibility", "the Dixmier-Douady form is a compatible simplicial form", [&](Sampler& gen) {
            std::vector<GroupTuple> tuples;
            for (int i = 0; i < options_.samples; ++i) tuples.push_back(gen.tuple(s.group(), levels));
            const auto theta = dd_compatible_form(s);
            for (const auto& t : tuples)
                for (std::size_t k = 0; k <= t.size(); ++k) vanishes = vanishes && theta(GroupTuple(t.begin(), t.begin() + static_cast<long>(k))).is_zero();
            auto rep = check_compatibility(theta, s.action(), levels, tuples);
            return rep.passed() ? Outcome{CheckStatus::pass, "", rep.checks}
                                : Outcome{CheckStatus::fail, compatibility_witness(*rep.failure), rep.checks};
        });
        r.observations.emplace_back("dd_form_vanishes", vanishes ? "true" : "false");
    }

    void dd_class(RunResult& r) {
        const auto& s = *scenario_;
        const auto E = elements();
        add(r, "dd-closed-form", "closed formula equals nabla applied to the curvature, no (0,3) part, closed", [&](Sampler& gen) {
            int cases = 0;
            for (int i = 0; i < options_.samples; ++i)
                for (int k = 0; k <= 3; ++k) {
                    const auto t = gen.tuple(s.group(), k);
                    const MixedForm theta = dd_form(s, t);
                    ++cases;
                    if (!theta.bidegree_part(0, 3).is_zero()) return Outcome{CheckStatus::fail, "(0,3) part at " + tuple_str(t), cases};
                    if (!theta.d().is_zero()) return Outcome{CheckStatus::fail, "not closed at " + tuple_str(t), cases};
                }
            return Outcome{CheckStatus::pass, "", cases};
        });
        add(r, "dd-integration", "integrating over the simplex gives -theta_g, alpha(g, h), then 0", [&](Sampler& gen) {
            std::vector<GroupTuple> tuples;
            for (const auto& g : E) tuples.push_back({g});
            for (const auto& g : E)
                for (const auto& h : E) tuples.push_back({g, h});
            for (int i = 0; i < options_.samples; ++i) tuples.push_back(gen.tuple(s.group(), 3));
            auto rep = dd_class_via_integration(s, tuples);
            return rep.passed() ? Outcome{CheckStatus::pass, "", rep.checks} : Outcome{CheckStatus::fail, *rep.failure, rep.checks};
        });
        for (std::size_t i = 0; i < std::min<std::size_t>(E.size(), 4); ++i)
            r.observations.emplace_back("integrated_dd" + tuple_str({E[i]}), integrated_dd(s, {E[i]}).str());
        for (std::size_t i = 0; i < std::min<std::size_t>(E.size(), 3); ++i)
            for (std::size_t j = 0; j < std::min<std::size_t>(E.size(), 3); ++j)
                r.observations.emplace_back("integrated_dd" + tuple_str({E[i], E[j]}), integrated_dd(s, {E[i], E[j]}).str());
    }

    void jlo_eval(RunResult& r) {
        const auto& s = *scenario_;
        const auto w1 = random_compatible_form(s, options_.seed * 2 + 1, 2), w2 = random_compatible_form(s, options_.seed * 2 + 2, 2);
        add(r, "tau-linear-in-form", "tau(w1 + w2) = tau(w1) + tau(w2)", [&](Sampler& gen) {
            JLOCharacter t1(s, w1), t2(s, w2), t12(s, w1 + w2);
            for (int i = 0; i < options_.samples; ++i) {
                const auto x = draw_chain_sample(gen, s, options_.kmax, options_.nmax);
                const UScalar lhs = t12(x.tuple, x.leading, x.rest), rhs = t1(x.tuple, x.leading, x.rest) + t2(x.tuple, x.leading, x.rest);
                if (lhs != rhs) return Outcome{CheckStatus::fail, chain_witness(x, lhs, rhs), i + 1};
            }
            return Outcome{CheckStatus::pass, "", options_.samples};
        });
        add(r, "tau-multilinear", "tau is additive and homogeneous in each argument", [&](Sampler& gen) {
            JLOCharacter tau(s, w1);
            int cases = 0;
            for (int i = 0; i < options_.samples; ++i) {
                auto x = draw_chain_sample(gen, s, options_.kmax, std::max(options_.nmax, 1));
                if (x.rest.empty()) x.rest.push_back(gen.end_element(s, 10));
                const auto slot = static_cast<std::size_t>(gen.uniform(0, static_cast<int>(x.rest.size()) - 1));
                const EndAlgebra extra = gen.end_element(s, 10);
                const Scalar c = gen.nonzero_scalar(s.action().cyclotomic_order());
                auto with = [&](const EndAlgebra& a) {
                    auto rest = x.rest;
                    rest[slot] = a;
                    return tau(x.tuple, x.leading, rest);
                };
                const UScalar lhs = with(x.rest[slot].scaled(c) + extra), rhs = with(x.rest[slot]).scaled(c) + with(extra);
                ++cases;
                if (lhs != rhs) return Outcome{CheckStatus::fail, chain_witness(x, lhs, rhs), cases};
            }
            return Outcome{CheckStatus::pass, "", cases};
        });
        Sampler gen(derived_seed("tau-values"));
        JLOCharacter tau(s, w1);
        for (int i = 0; i < 3; ++i) {
            const auto x = draw_chain_sample(gen, s, options_.kmax, options_.nmax);
            r.observations.emplace_back("tau" + tuple_str(x.tuple) + " n=" + std::to_string(x.rest.size()), tau(x.tuple, x.leading, x.rest).str());
        }
    }

    void chain(RunResult& r) {
        const auto& s = *scenario_;
        add(r, "jlo-chain-map", "tau(Dtw w) = ((b + uB) and delta' under the " + to_string(options_.sign_convention) + " convention) tau(w)",
            [&](Sampler& gen) {
                std::vector<ChainSample> samples;
                for (int i = 0; i < options_.samples; ++i) samples.push_back(draw_chain_sample(gen, s, std::min(options_.kmax, 2), std::min(options_.nmax, 2)));
                const auto omega = random_compatible_form(s, options_.seed * 7 + 3, 2);
                return from_chain(chain_check(s, omega, samples, options_.sign_convention));
            });
        add(r, "pipeline-chain-map", "(b + uB) Phi(w) = Phi(Dtw w) for Phi = Psi2 Psi1 R Psi0 tau", [&](Sampler& gen) {
            if (!s.group().is_finite()) return Outcome{CheckStatus::skip, "", 0, "the homotopy splits the unit over the whole group, which is infinite"};
            std::vector<PipelineSample> samples;
            for (int i = 0; i < options_.pipeline_samples; ++i) samples.push_back(draw_pipeline_sample(gen, scenario_, std::min(options_.nmax, 1)));
            Pipeline phi{s, s.dim() + 2, {}};
            return from_chain(pipeline_check(phi, pipeline_form(s, options_.seed * 7 + 5), samples));
        });
    }

    std::string inputs_digest(const std::string& id) const {
        std::string key = digest_ + "|" + id + "|" + std::to_string(options_.seed) + "|" + std::to_string(options_.kmax) + "|" +
                          std::to_string(options_.nmax) + "|" + std::to_string(options_.samples) + "|" +
                          std::to_string(options_.pipeline_samples) + "|" + to_string(options_.sign_convention);
        return hex64(fnv1a(key));
    }

private:
    std::uint64_t derived_seed(const std::string& id) const { return fnv1a(id, options_.seed * 0x9e3779b97f4a7c15ULL + 1); }

    static std::string compatibility_witness(const CompatibilityWitness& w) {
        return "level " + std::to_string(w.level) + " face " + std::to_string(w.face) + " at " + tuple_str(w.tuple) + ": " + w.detail;
    }

    static Outcome from_chain(const ChainReport& rep) {
        if (rep.failure) return Outcome{CheckStatus::fail, *rep.failure, rep.checks};
        if (rep.checks == 0) return Outcome{CheckStatus::skip, "", 0, "every sample was outside the evaluable range"};
        return Outcome{CheckStatus::pass, "", rep.checks, std::to_string(rep.nondegenerate) + " nondegenerate of " + std::to_string(rep.checks)};
    }

    void add(RunResult& r, const std::string& id, const std::string& anchor, const std::function<Outcome(Sampler&)>& body) {
        CheckResult c{id, anchor, inputs_digest(id), CheckStatus::pass, "", "", 0, 0};
        Sampler gen(derived_seed(id));
        const auto start = std::chrono::steady_clock::now();
        try {
            Outcome o = body(gen);
            c.status = o.status;
            c.witness = std::move(o.witness);
            c.cases = o.cases;
            c.note = std::move(o.note);
        } catch (const std::exception& e) {
            c.status = CheckStatus::fail;
            c.witness = std::string("error: ") + e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.checks.push_back(std::move(c));
    }

    ScenarioFile file_;
    RunOptions options_;
    std::shared_ptr<const GerbeScenario> scenario_;
    std::string digest_;
};

}  // namespace gerbejlo

#endif
